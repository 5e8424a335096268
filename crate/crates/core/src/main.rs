fn main() {
    std::process::exit(fibrate::cli::main())
}
