fn main() {
    std::process::exit(eggwave::cli::run(std::env::args_os()));
}
