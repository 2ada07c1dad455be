fn main() {
    std::process::exit(argo::cli::main_with_args(std::env::args_os()));
}
