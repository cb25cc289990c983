fn main() {
    std::process::exit(cutjump::cli::run(std::env::args_os()));
}
