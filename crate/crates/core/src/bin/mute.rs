fn main() {
    std::process::exit(mute::cli::run(std::env::args_os()));
}
