fn main() {
    std::process::exit(gnar::cli::main_with_args(std::env::args_os()));
}
