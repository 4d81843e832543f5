fn main() {
    std::process::exit(mimo_crb::cli::main_with_args(std::env::args_os()));
}
