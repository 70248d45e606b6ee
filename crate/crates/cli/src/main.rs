fn main() {
    std::process::exit(pretense_cli::run(std::env::args_os()));
}
