fn main() {
    std::process::exit(mcwave_cli::run(std::env::args_os()));
}
