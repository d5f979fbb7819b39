use clap::Parser;

fn main() {
    let cli = citemap_cli::Cli::parse();
    if let Err(e) = citemap_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
