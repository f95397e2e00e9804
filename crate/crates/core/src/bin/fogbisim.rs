fn main() {
    std::process::exit(fogbisim::cli::main());
}
