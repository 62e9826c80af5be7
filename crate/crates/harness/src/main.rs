fn main() {
    std::process::exit(argbind_harness::cli::run(std::env::args_os()));
}
