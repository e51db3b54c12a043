fn main() {
    std::process::exit(steinitz::cli::run_cli(std::env::args()));
}
