fn main() {
    std::process::exit(kirchhoff_cli::run(std::env::args_os()));
}
