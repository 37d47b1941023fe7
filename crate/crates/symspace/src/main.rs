fn main() {
    std::process::exit(symspace::cli::main_with_args(std::env::args_os()));
}
