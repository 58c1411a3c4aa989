fn main() {
    std::process::exit(qig_core::cli::run(std::env::args_os()));
}
