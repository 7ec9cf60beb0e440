fn main() {
    std::process::exit(ompar::cli::run(std::env::args_os()));
}
