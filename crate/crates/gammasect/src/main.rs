fn main() {
    std::process::exit(gammasect::cli::run(std::env::args_os()));
}
