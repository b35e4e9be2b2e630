fn main() {
    std::process::exit(cocked_hat_cli::run(std::env::args_os()));
}
