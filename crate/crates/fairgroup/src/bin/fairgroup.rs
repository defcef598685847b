fn main() {
    std::process::exit(fairgroup::cli::run(std::env::args_os()));
}
