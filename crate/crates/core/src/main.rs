fn main() {
    std::process::exit(schwarz_scaling::cli::main_with_args(std::env::args_os()));
}
