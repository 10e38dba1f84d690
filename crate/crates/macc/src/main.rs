fn main() {
    std::process::exit(macc::cli::main_entry());
}
