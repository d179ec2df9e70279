fn main() {
    std::process::exit(mfdm_cli::run(std::env::args_os()));
}
