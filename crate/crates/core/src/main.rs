fn main() {
    std::process::exit(logicwb::cli::run(std::env::args_os()));
}
