fn main() {
    std::process::exit(advdist::cli::run(std::env::args_os()));
}
