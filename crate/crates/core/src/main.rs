fn main() {
    std::process::exit(finsler_blowup::cli::run(std::env::args_os()));
}
