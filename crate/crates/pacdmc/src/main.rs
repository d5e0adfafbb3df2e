fn main() -> std::process::ExitCode {
    pacdmc::cli::main_from_env()
}
