fn main() {
    std::process::exit(divsim::cli::main_with_args(std::env::args_os()));
}
