fn main() {
    std::process::exit(esm::cli::run(std::env::args_os()));
}
