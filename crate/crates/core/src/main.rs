fn main() { std::process::exit(genus2::cli::main()) }
