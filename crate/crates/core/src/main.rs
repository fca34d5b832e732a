fn main() {
    std::process::exit(mrclens::cli::main_with_args(std::env::args_os()));
}
