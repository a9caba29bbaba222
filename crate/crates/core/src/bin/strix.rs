fn main() {
    std::process::exit(strix::cli::main_with(std::env::args_os()));
}
