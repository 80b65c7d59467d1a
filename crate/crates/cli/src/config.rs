//! Flags, `key=value` config files, and their merge (flags win).

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::bound::Bound;
use crate::error::{CliError, Result};
use crate::eval::TRange;
use crate::preset::Preset;

/// Command-line flags.
#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "blockfade",
    version,
    about = "Rate bounds for the noncoherent Rayleigh block-fading channel",
    long_about = "Evaluates asymptotic and finite block-length rate bounds for the noncoherent \
                  Rayleigh block-fading channel, sweeps them over the coherence time or the \
                  block-length, locates the rate-maximizing coherence time and writes CSV."
)]
pub struct Args {
    /// SNR in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Coherence time T (channel uses per fading block).
    #[arg(long = "T")]
    pub t: Option<u32>,
    /// Block-length n in channel uses.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target block error probability.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Bounds to evaluate: L, U, C_coh, fano, dt, na_coh, na_noncoh (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub bound: Option<Vec<Bound>>,
    /// Sweep over coherence times lo:hi:step at fixed n.
    #[arg(long = "sweep-T")]
    pub sweep_t: Option<TRange>,
    /// Sweep over block-lengths (comma separated) at fixed T.
    #[arg(long = "sweep-n", value_delimiter = ',')]
    pub sweep_n: Option<Vec<usize>>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Base seed for the Monte Carlo streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path, `-` for standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reproduce a figure grid: fig1, fig2, fig3 or fig4.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Report the coherence time that maximizes the rate.
    #[arg(long = "find-tstar")]
    pub find_tstar: bool,
    /// Use the DT bound instead of the normal approximation for --find-tstar.
    #[arg(long)]
    pub exact: bool,
    /// key=value file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// More diagnostics on standard error (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

/// Run configuration after merging the config file and the flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    /// SNR in dB.
    pub snr_db: Option<f64>,
    /// Coherence time.
    pub t: Option<u32>,
    /// Block-length.
    pub n: Option<usize>,
    /// Target error probability.
    pub epsilon: Option<f64>,
    /// Bounds to evaluate.
    pub bounds: Option<Vec<Bound>>,
    /// T sweep.
    pub sweep_t: Option<TRange>,
    /// n sweep.
    pub sweep_n: Option<Vec<usize>>,
    /// Monte Carlo samples per point.
    pub samples: Option<usize>,
    /// Base seed.
    pub seed: Option<u64>,
    /// Output path.
    pub out: Option<PathBuf>,
    /// Figure preset.
    pub preset: Option<Preset>,
    /// T* search.
    pub find_tstar: Option<bool>,
    /// DT instead of the normal approximation in the T* search.
    pub exact: Option<bool>,
}

impl Args {
    /// The flags as a configuration layer; unset flags stay `None`.
    pub fn to_config(&self) -> Config {
        Config {
            snr_db: self.snr_db,
            t: self.t,
            n: self.n,
            epsilon: self.epsilon,
            bounds: self.bound.clone(),
            sweep_t: self.sweep_t,
            sweep_n: self.sweep_n.clone(),
            samples: self.samples,
            seed: self.seed,
            out: self.out.clone(),
            preset: self.preset,
            find_tstar: self.find_tstar.then_some(true),
            exact: self.exact.then_some(true),
        }
    }

    /// Config file (if any) overridden by the flags.
    pub fn resolve(&self) -> Result<Config> {
        let flags = self.to_config();
        match &self.config {
            Some(path) => Ok(Config::from_file(path)?.overlay(flags)),
            None => Ok(flags),
        }
    }
}

fn parse_bool(raw: &str) -> std::result::Result<bool, String> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{raw}` is not a boolean")),
    }
}

fn parse_list<T: FromStr>(raw: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

fn parse_one<T: FromStr>(raw: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| format!("`{raw}`: {e}"))
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment. Keys are the flag
    /// names without dashes, e.g. `snr-db = 10` or `sweep-T = 2:200:2`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Config::default();
        for (k, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let key = key.trim().trim_start_matches('-').replace('_', "-").to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "snr-db" => cfg.snr_db = Some(parse_one(value).map_err(err)?),
                "t" => cfg.t = Some(parse_one(value).map_err(err)?),
                "n" => cfg.n = Some(parse_one(value).map_err(err)?),
                "epsilon" => cfg.epsilon = Some(parse_one(value).map_err(err)?),
                "bound" => cfg.bounds = Some(parse_list(value).map_err(err)?),
                "sweep-t" => cfg.sweep_t = Some(parse_one(value).map_err(err)?),
                "sweep-n" => cfg.sweep_n = Some(parse_list(value).map_err(err)?),
                "samples" => cfg.samples = Some(parse_one(value).map_err(err)?),
                "seed" => cfg.seed = Some(parse_one(value).map_err(err)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "preset" => cfg.preset = Some(parse_one(value).map_err(err)?),
                "find-tstar" => cfg.find_tstar = Some(parse_bool(value).map_err(err)?),
                "exact" => cfg.exact = Some(parse_bool(value).map_err(err)?),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// `self` with every field that `top` sets replaced by `top`'s value.
    pub fn overlay(self, top: Config) -> Config {
        Config {
            snr_db: top.snr_db.or(self.snr_db),
            t: top.t.or(self.t),
            n: top.n.or(self.n),
            epsilon: top.epsilon.or(self.epsilon),
            bounds: top.bounds.or(self.bounds),
            sweep_t: top.sweep_t.or(self.sweep_t),
            sweep_n: top.sweep_n.or(self.sweep_n),
            samples: top.samples.or(self.samples),
            seed: top.seed.or(self.seed),
            out: top.out.or(self.out),
            preset: top.preset.or(self.preset),
            find_tstar: top.find_tstar.or(self.find_tstar),
            exact: top.exact.or(self.exact),
        }
    }
}
