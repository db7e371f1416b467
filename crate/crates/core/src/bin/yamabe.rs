fn main() {
    std::process::exit(yamabe_core::cli::main_with_args(std::env::args_os()));
}
