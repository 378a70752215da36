fn main() {
    std::process::exit(shid::cli::main_with_args(std::env::args_os()));
}
