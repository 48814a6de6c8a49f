fn main() {
    std::process::exit(fqc::cli::run());
}
