fn main() {
    std::process::exit(ergolab::cli::main());
}
