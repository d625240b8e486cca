mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use config::{Args, RunConfig};

fn configure_threads() {
    let Some(n) = std::env::var("EXQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    configure_threads();
    let result = RunConfig::try_from(args).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("exq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
