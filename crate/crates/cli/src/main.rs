use clap::Parser;

fn main() {
    let cli = bellkit_cli::Cli::parse();
    let invocation: Vec<String> = std::env::args().collect();
    if let Err(e) = bellkit_cli::run(cli, invocation) {
        eprintln!("bellkit: {e}");
        std::process::exit(e.exit_code());
    }
}
