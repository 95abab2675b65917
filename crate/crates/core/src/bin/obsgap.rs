fn main() {
    std::process::exit(obsgap::cli::run(std::env::args_os()));
}
