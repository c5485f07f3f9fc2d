fn main() {
    std::process::exit(pivotal_sampling::cli::main());
}
