fn main() -> std::process::ExitCode {
    concurrence_lab::cli::main()
}
