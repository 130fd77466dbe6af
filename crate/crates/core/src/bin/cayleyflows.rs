fn main() {
    std::process::exit(cayleyflows::cli::run(std::env::args_os()));
}
