fn main() -> std::process::ExitCode {
    caplab::cli::main_with_args(std::env::args_os())
}
