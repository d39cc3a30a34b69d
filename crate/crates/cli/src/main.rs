fn main() {
    std::process::exit(hetsafe_cli::run_command(std::env::args_os()));
}
