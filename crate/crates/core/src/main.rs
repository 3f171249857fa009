fn main() {
    std::process::exit(swk_core::cli::run(std::env::args_os()));
}
