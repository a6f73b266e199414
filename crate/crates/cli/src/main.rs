use clap::Parser;

use magcap_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let code = magcap_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
