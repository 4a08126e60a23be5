fn main() {
    std::process::exit(gscqc::cli::main());
}
