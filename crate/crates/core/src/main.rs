fn main() {
    std::process::exit(macmahon::cli::run(std::env::args_os()));
}
