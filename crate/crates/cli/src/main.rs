mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Context;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let ctx = Context { output_dir: cli.output_dir.clone(), format: cli.format, seed: cli.seed };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start {} workers: {e}", cli.workers);
            return ExitCode::from(output::EXIT_USAGE);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Detect(a) => commands::detect(&ctx, a),
        Command::Calibrate(a) => commands::calibrate(&ctx, a),
        Command::Augment(a) => commands::augment(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Plot(a) => commands::plot(&ctx, a),
        Command::Generate(a) => commands::generate(&ctx, a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
