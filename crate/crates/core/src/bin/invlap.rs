fn main() {
    std::process::exit(invlap::cli::run(std::env::args()));
}
