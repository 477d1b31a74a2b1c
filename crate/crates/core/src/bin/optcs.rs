use clap::Parser;

fn main() {
    let cli = optcs::cli::Cli::parse();
    if let Err(e) = optcs::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
