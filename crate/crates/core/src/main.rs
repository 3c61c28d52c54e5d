fn main() {
    std::process::exit(gdcsma::cli::main());
}
