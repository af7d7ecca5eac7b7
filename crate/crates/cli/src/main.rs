fn main() {
    std::process::exit(quasiperc_cli::main_with(std::env::args_os()));
}
