fn main() {
    std::process::exit(mpjc_cli::main_with_args(std::env::args_os()));
}
