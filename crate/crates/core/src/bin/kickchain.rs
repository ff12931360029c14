fn main() {
    std::process::exit(kickchain::cli::run_from_args(std::env::args().collect()));
}
