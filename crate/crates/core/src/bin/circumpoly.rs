fn main() {
    std::process::exit(circumpoly::cli::run(std::env::args_os()));
}
