use clap::Parser;
use polygame_cli::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdin = std::io::stdin();
    let code = run(cli, &mut stdin.lock(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
