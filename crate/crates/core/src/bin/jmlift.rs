fn main() {
    std::process::exit(jmlift::cli::run(std::env::args_os()));
}
