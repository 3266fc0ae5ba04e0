fn main() -> std::process::ExitCode {
    ontomatch::cli::main()
}
