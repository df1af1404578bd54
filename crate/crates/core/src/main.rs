fn main() {
    std::process::exit(crsing::cli::run(std::env::args_os()));
}
