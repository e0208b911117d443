fn main() {
    std::process::exit(urbanpaths::cli::run_cli(std::env::args_os()));
}
