fn main() {
    std::process::exit(snapkit_cli::cli::main_with_args(std::env::args_os()));
}
