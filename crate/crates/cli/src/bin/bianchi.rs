fn main() {
    std::process::exit(bianchi_cli::bianchi_main(std::env::args_os()));
}
