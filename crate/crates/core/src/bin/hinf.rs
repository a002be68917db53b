fn main() {
    std::process::exit(hinf_core::bench::cli_main(std::env::args_os()));
}
