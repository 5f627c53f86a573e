fn main() {
    std::process::exit(transparent_detectors::cli::run(std::env::args_os()));
}
