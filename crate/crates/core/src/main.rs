fn main() -> std::process::ExitCode {
    ostrowski::harness::cli::run(std::env::args_os())
}
