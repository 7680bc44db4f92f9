fn main() {
    std::process::exit(spectral_fn::cli::main_with_args(std::env::args_os()));
}
