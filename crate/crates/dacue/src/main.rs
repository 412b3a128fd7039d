fn main() {
    std::process::exit(dacue::cli::run(std::env::args_os()));
}
