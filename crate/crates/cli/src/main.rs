use clap::Parser;

fn main() {
    let cli = largo_cli::app::Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let code = largo_cli::app::run(cli, &mut stdout);
    std::process::exit(code);
}
