fn main() {
    std::process::exit(cptni::cli::run(std::env::args_os()));
}
