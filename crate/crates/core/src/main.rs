use clap::Parser;

use certify::cli::{main_with, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(main_with(&args));
}
