fn main() {
    std::process::exit(zpeff_cli::run(std::env::args_os()));
}
