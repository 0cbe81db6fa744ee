fn main() {
    std::process::exit(mtdespeckle::cli::run(std::env::args_os()));
}
