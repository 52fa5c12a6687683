fn main() {
    std::process::exit(cge_cli::run(std::env::args_os()));
}
