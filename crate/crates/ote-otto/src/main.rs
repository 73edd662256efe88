fn main() {
    std::process::exit(ote_otto::cli::run());
}
