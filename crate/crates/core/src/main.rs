fn main() {
    std::process::exit(rescue_games::cli::run(std::env::args_os()));
}
