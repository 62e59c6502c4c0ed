fn main() {
    std::process::exit(rhgt::cli::run(std::env::args_os()));
}
