fn main() {
    std::process::exit(auq::cli::main_with_args(std::env::args_os()));
}
