fn main() {
    std::process::exit(liegen::cli::run(std::env::args_os()));
}
