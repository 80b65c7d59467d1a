use std::path::PathBuf;
use std::process::ExitCode;

use blockfade::{emit_csv, run, Args, CliError, RayonRunner};
use clap::Parser;

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let result = args.resolve().and_then(|cfg| {
        let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("-"));
        log::info!("{} worker thread(s)", rayon::current_num_threads());
        let outcome = run(&cfg, &RayonRunner)?;
        emit_csv(&outcome.rows, &out)?;
        if let Some(ts) = outcome.tstar {
            eprintln!("T* = {} ({:.6} bits/channel use, {})", ts.t, ts.rate_bits, ts.row.bound);
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
