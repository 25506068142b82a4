fn main() {
    std::process::exit(faultloc::cli::run(std::env::args_os()));
}
