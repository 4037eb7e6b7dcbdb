fn main() {
    std::process::exit(robust_ts::harness::cli::cli_main(std::env::args_os()));
}
