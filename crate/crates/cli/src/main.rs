fn main() {
    std::process::exit(contperc_cli::run_cli(std::env::args_os()));
}
