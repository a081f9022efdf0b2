use clap::Parser;
use perclab_cli::{main_with, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(main_with(&args));
}
