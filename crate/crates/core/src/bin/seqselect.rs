fn main() {
    std::process::exit(seqselect::cli::main());
}
