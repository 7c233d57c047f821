fn main() { std::process::exit(dtour::cli::run()); }
