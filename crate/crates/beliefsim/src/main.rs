fn main() {
    std::process::exit(beliefsim::cli::run());
}
