fn main() {
    std::process::exit(racgdiv_cli::run_from_args(std::env::args_os()));
}
