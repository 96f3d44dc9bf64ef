fn main() {
    std::process::exit(symest::cli::main_with_args(std::env::args_os()));
}
