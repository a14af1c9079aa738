fn main() {
    std::process::exit(vnfplace::cli::run(std::env::args_os()));
}
