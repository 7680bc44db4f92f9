//! Exact spectral functions of the Laplacian on model manifolds (round
//! spheres, flat tori, Euclidean space), their diagonal rescaling, and the
//! numerical experiments comparing the rescaled kernels with the universal
//! Bessel profile `K_m(s) = (2πs)^{-m/2} J_{m/2}(s)`.
//!
//! Data-parallel loops go through [`Execution`]; with the default
//! `parallel` feature they run on rayon, otherwise sequentially. Results do
//! not depend on the policy.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compensated;
pub mod error;
pub mod euclid;
pub mod exec;
pub mod experiments;
pub mod jet;
pub mod output;
pub mod profile;
pub mod specfun;
pub mod sphere;
pub mod torus;

pub use error::{Error, Result};
pub use exec::Execution;
pub use jet::TaylorJet;
pub use profile::{Manifold, RadialProfile};
pub use specfun::BesselOrder;
pub use sphere::SphereGeometry;
pub use torus::TorusGeometry;

