fn main() -> std::process::ExitCode {
    bvm::cli::run()
}
