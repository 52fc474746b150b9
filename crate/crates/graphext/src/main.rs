use clap::Parser;
use graphext::cli::{run, RunConfig, EXIT_INPUT};

fn main() {
    let config = RunConfig::parse();
    let code = match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}
