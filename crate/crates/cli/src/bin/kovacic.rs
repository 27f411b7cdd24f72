fn main() {
    std::process::exit(bianchi_cli::kovacic_main(std::env::args_os()));
}
