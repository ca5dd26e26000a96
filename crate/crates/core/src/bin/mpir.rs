fn main() {
    if let Err(e) = mpir::cli::run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
