use std::f64::consts::PI;

use proptest::prelude::*;

use spectral_fn::euclid::{self, MultiIndex};
use spectral_fn::experiments::GrowthFit;
use spectral_fn::output::format_value;
use spectral_fn::profile::linear_grid;
use spectral_fn::specfun::{universal_profile, universal_profile_at_zero};
use spectral_fn::sphere::sphere_area;
use spectral_fn::{Execution, SphereGeometry, TorusGeometry};

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_k.
fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=k {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let rule = gauss_legendre(40);
    for p in 0..40 {
        let q: f64 = rule.iter().map(|(x, w)| w * x.powi(p)).sum();
        let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
        assert!((q - exact).abs() < 1e-14, "x^{p}");
    }
}

#[test]
fn legendre_orthogonality() {
    // substitute t = cos θ so the weight sin^{d−2} θ is smooth on [0, π]
    let rule = gauss_legendre(240);
    for d in 3..=7u32 {
        let g = SphereGeometry::new(d).unwrap();
        let nodes: Vec<(f64, f64)> = rule
            .iter()
            .map(|&(x, w)| {
                let theta = 0.5 * PI * (x + 1.0);
                (theta, 0.5 * PI * w * theta.sin().powi(d as i32 - 2))
            })
            .collect();
        for j in 0..=25u64 {
            for k in j..=25u64 {
                let ip: f64 = nodes
                    .iter()
                    .map(|&(th, w)| w * g.legendre(j, th.cos()).unwrap() * g.legendre(k, th.cos()).unwrap())
                    .sum();
                let want = if j == k { g.h_norm(j).unwrap() } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "d={d} j={j} k={k}: {ip} vs {want}");
            }
        }
    }
}

fn multi_index(m: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, m).prop_map(MultiIndex::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_normalized_bounded_and_parity(d in 3u32..9, n in 0u64..400, t in -1.0f64..=1.0) {
        let g = SphereGeometry::new(d).unwrap();
        prop_assert!((g.legendre(n, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let p = g.legendre(n, t).unwrap();
        prop_assert!(p.abs() <= 1.0 + 1e-12);
        let q = g.legendre(n, -t).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p - sign * q).abs() <= 1e-12);
    }

    #[test]
    fn christoffel_darboux_agrees_with_direct_sum(d in 3u32..7, n in 0u64..300, phi in 1e-3f64..PI) {
        let g = SphereGeometry::new(d).unwrap();
        let cd = g.spectral_cd(n, phi).unwrap();
        let direct = g.spectral_direct(n, phi.cos()).unwrap();
        prop_assert!((cd - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn sphere_diagonal_counts_harmonics(d in 3u32..8, n in 1u64..200) {
        let g = SphereGeometry::new(d).unwrap();
        let dim: f64 = (0..=n).map(|k| g.multiplicity(k).unwrap() as f64).sum();
        let e0 = g.spectral_cd(n, 0.0).unwrap();
        prop_assert!((e0 - dim / sphere_area(d).unwrap()).abs() <= 1e-12 * e0);
        prop_assert!(g.spectral_cd(n, 0.3).unwrap().abs() <= e0 * (1.0 + 1e-12));
    }

    #[test]
    fn torus_kernel_is_even_and_periodic(
        m in 1usize..=3,
        side in 0.5f64..4.0,
        level in 0.0f64..800.0,
        u in prop::collection::vec(-3.0f64..3.0, 3),
        shift in prop::collection::vec(-2i32..=2, 3),
    ) {
        let t = TorusGeometry::new(m, side).unwrap();
        let u = &u[..m];
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let shifted: Vec<f64> = u.iter().zip(&shift).map(|(x, k)| x + *k as f64 * side).collect();
        let a = t.spectral(level, u).unwrap();
        prop_assert_eq!(a, t.spectral(level, &neg).unwrap());
        let scale = t.spectral(level, &vec![0.0; m]).unwrap();
        prop_assert!((a - t.spectral(level, &shifted).unwrap()).abs() <= 1e-10 * scale);
        prop_assert!(a.abs() <= scale * (1.0 + 1e-12));
    }

    #[test]
    fn torus_diagonal_matches_weyl_count(m in 1usize..=2, level in 0.0f64..1e4) {
        let t = TorusGeometry::new(m, 2.0 * PI).unwrap();
        let r = level.sqrt() as i64 + 1;
        let brute = if m == 1 {
            (-r..=r).filter(|a| ((a * a) as f64) <= level).count()
        } else {
            let mut c = 0;
            for a in -r..=r {
                for b in -r..=r {
                    if ((a * a + b * b) as f64) <= level {
                        c += 1;
                    }
                }
            }
            c
        };
        prop_assert_eq!(t.lattice_count(level).unwrap(), brute as u64);
        let e0 = t.spectral(level, &vec![0.0; m]).unwrap() * t.volume();
        prop_assert!((e0 - brute as f64).abs() <= 1e-9 * brute as f64);
    }

    #[test]
    fn torus_diagonal_is_monotone(m in 1usize..=3, a in 0.0f64..500.0, b in 0.0f64..500.0) {
        let t = TorusGeometry::new(m, 2.0).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let zero = vec![0.0; m];
        prop_assert!(t.spectral(lo, &zero).unwrap() <= t.spectral(hi, &zero).unwrap());
    }

    #[test]
    fn coefficients_match_ball_moments(m in 1usize..=3, seed_a in multi_index(3, 4), seed_b in multi_index(3, 4)) {
        let a = MultiIndex::new(seed_a.entries()[..m].to_vec());
        let b = MultiIndex::new(seed_b.entries()[..m].to_vec());
        let v = euclid::diagonal_coefficient(m, &a, &b).unwrap();
        let o = euclid::diagonal_coefficient_from_moment(m, &a, &b).unwrap();
        if o == 0.0 {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!((v - o).abs() <= 1e-12 * o.abs());
        }
        prop_assert_eq!(v, euclid::diagonal_coefficient(m, &b, &a).unwrap());
    }

    #[test]
    fn universal_profile_peaks_at_the_origin(m in 1u32..=3, s in 0.0f64..60.0) {
        prop_assert!(universal_profile(m, s).unwrap().abs() <= universal_profile_at_zero(m).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn growth_fit_bounds_every_order(mags in prop::collection::vec(0.0f64..10.0, 1..13)) {
        prop_assume!(mags.iter().any(|&m| m > 0.0));
        let fit = GrowthFit::from_magnitudes(mags.clone()).unwrap();
        prop_assert!(fit.k_fit > 0.0 && fit.t_fit > 0.0);
        let mut tight = false;
        for (j, m) in mags.iter().enumerate() {
            let b = fit.bound(j);
            prop_assert!(*m <= b * (1.0 + 1e-12));
            tight |= (m - b).abs() <= 1e-12 * b;
        }
        prop_assert!(tight);
    }

    #[test]
    fn csv_values_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(format_value(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn execution_policies_agree_bitwise(n in 1u64..300, level in 10.0f64..3000.0) {
        let g = SphereGeometry::new(3).unwrap();
        let grid = linear_grid(0.0, 3.0, 40);
        let a = g.rescaled_profile(n, &grid, Execution::Sequential).unwrap();
        let b = g.rescaled_profile(n, &grid, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
        let t = TorusGeometry::new(2, 2.0 * PI).unwrap();
        let ss = linear_grid(0.0, 2.0, 10);
        let a = t.rescaled_profile(level, &[0.6, 0.8], &ss, Execution::Sequential).unwrap();
        let b = t.rescaled_profile(level, &[0.6, 0.8], &ss, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }
}
