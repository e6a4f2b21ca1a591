fn main() {
    std::process::exit(polya_cert::cli::run(std::env::args_os()));
}
