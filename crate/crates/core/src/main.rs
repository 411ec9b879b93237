fn main() {
    std::process::exit(entfrac::cli::main_with_args(std::env::args_os()));
}
