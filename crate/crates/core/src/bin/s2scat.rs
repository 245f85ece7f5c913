fn main() {
    std::process::exit(s2scat::cli::run(std::env::args_os()));
}
