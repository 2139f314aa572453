fn main() {
    std::process::exit(horopack_cli::run(std::env::args_os()));
}
