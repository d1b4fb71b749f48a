fn main() {
    std::process::exit(heartwood::cli::main_with(std::env::args_os()));
}
