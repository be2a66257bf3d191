fn main() {
    std::process::exit(fairdiv::cli::run());
}
