fn main() {
    std::process::exit(qsym3_cli::run(std::env::args_os()));
}
