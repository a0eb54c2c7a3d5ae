use clap::Parser;

fn main() {
    let cli = bellclone::cli::Cli::parse();
    std::process::exit(bellclone::cli::run(cli));
}
