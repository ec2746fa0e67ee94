fn main() {
    std::process::exit(aqa_cli::run(std::env::args_os()));
}
