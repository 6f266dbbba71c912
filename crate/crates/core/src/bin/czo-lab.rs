fn main() {
    std::process::exit(czo_lab::lab::cli::main());
}
