fn main() { std::process::exit(lofu::cli::run(std::env::args().collect())); }
