use clap::Parser;

fn main() {
    let cli = polyinv_cli::Cli::parse();
    if let Err(e) = polyinv_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
