fn main() {
    std::process::exit(p2pa::cli::run(std::env::args_os()));
}
