fn main() {
    std::process::exit(polydecomp::cli::run(std::env::args_os()));
}
