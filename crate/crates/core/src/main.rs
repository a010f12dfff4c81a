fn main() {
    std::process::exit(rotweingarten::cli::run(std::env::args_os()));
}
