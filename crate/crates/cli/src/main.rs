//! `parkscan`: detection, batch runs, evaluation, synthetic scenes, store
//! sync and the slot service, from one binary.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod batch;
mod config;
mod detect;
mod eval;
mod exit;
mod serve;
mod store;
mod synth;
mod sync;

#[derive(Parser, Debug)]
#[command(name = "parkscan", version, about = "Parking slot occupancy from overhead images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect occupancy in one image.
    Detect(detect::Args),
    /// Detect every image in a directory and write a manifest.
    Batch(batch::Args),
    /// Score results against ground truth.
    Eval(eval::Args),
    /// Render synthetic lot scenes with ground truth.
    Synth(synth::Args),
    /// Process new source images from an object store.
    Sync(sync::Args),
    /// Run the slot service.
    Serve(serve::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => detect::run(a),
        Command::Batch(a) => batch::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Sync(a) => sync::run(a),
        Command::Serve(a) => serve::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
