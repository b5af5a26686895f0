fn main() {
    std::process::exit(tma_haar::cli::run(std::env::args_os()));
}
