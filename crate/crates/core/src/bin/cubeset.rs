fn main() {
    std::process::exit(cubeset::cli::run(std::env::args_os()));
}
