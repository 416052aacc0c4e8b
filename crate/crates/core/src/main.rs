fn main() {
    std::process::exit(normform::cli::main_with_args(std::env::args_os()));
}
