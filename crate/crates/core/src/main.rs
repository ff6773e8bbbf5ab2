fn main() {
    std::process::exit(renorm_lab::cli::main_with_args(std::env::args_os()));
}
