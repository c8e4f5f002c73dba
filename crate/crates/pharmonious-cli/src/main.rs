fn main() {
    std::process::exit(pharmonious_cli::main_impl());
}
