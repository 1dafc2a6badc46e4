fn main() {
    let stdout = std::io::stdout();
    let code = pdqp::bench::cli::run_cli(std::env::args_os(), &mut stdout.lock());
    std::process::exit(code);
}
