fn main() -> std::process::ExitCode {
    gridqubo::cli::main()
}
