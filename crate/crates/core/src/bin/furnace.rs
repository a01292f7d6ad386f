fn main() -> std::process::ExitCode {
    furnace::cli::main()
}
