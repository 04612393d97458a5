fn main() {
    std::process::exit(pmroot::cli::run(std::env::args_os()));
}
