//! Dispatch of a resolved configuration to points, sweeps, presets or the T* search.

use blockfade_core::mc::ChunkRunner;

use crate::bound::Bound;
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::eval::{eval_points, find_tstar, ordering_violations, sweep_n, sweep_t, Point, Settings, TStar};
use crate::row::SweepRow;

/// SNR used when none is configured.
pub const DEFAULT_SNR_DB: f64 = 10.0;
/// Error probability used when none is configured.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Base seed used when none is configured.
pub const DEFAULT_SEED: u64 = 1;

/// Rows produced by a run, plus the T* result when one was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Evaluated rows in output order.
    pub rows: Vec<SweepRow>,
    /// Set by `--find-tstar`.
    pub tstar: Option<TStar>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn tstar_bound(cfg: &Config) -> Result<Bound> {
    let exact = cfg.exact.unwrap_or(false);
    match (cfg.bounds.as_deref(), exact) {
        (None, false) => Ok(Bound::NaNoncoh),
        (None, true) => Ok(Bound::Dt),
        (Some([b]), false) => Ok(*b),
        (Some([Bound::Dt]), true) => Ok(Bound::Dt),
        (Some(_), true) => Err(usage("--exact selects the dt bound; drop --bound or pass --bound dt")),
        (Some(_), false) => Err(usage("--find-tstar takes a single --bound")),
    }
}

fn bounds(cfg: &Config) -> Result<&[Bound]> {
    match cfg.bounds.as_deref() {
        Some(b) if !b.is_empty() => Ok(b),
        _ => Err(usage("no bound selected; pass --bound (e.g. --bound L,U)")),
    }
}

/// Executes the configured evaluation.
pub fn run<R: ChunkRunner + ?Sized>(cfg: &Config, runner: &R) -> Result<Outcome> {
    let settings = Settings {
        samples: cfg.samples,
        base_seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        ..Settings::default()
    };
    if cfg.exact == Some(true) && cfg.find_tstar != Some(true) {
        return Err(usage("--exact only applies together with --find-tstar"));
    }
    let snr_db = cfg.snr_db.unwrap_or(DEFAULT_SNR_DB);
    let epsilon = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
    let find = cfg.find_tstar.unwrap_or(false);

    let outcome = if let Some(preset) = cfg.preset {
        if find {
            let n = preset
                .block_length()
                .ok_or_else(|| usage(format!("--find-tstar needs a T sweep; preset {preset} sweeps n")))?;
            let bound = tstar_bound(cfg)?;
            log::info!("T* search on the {preset} grid with {bound}");
            let rows = sweep_t(snr_db, n, epsilon, &preset.t_grid(), &[bound], &settings, runner)?;
            let tstar = find_tstar(&rows)?;
            Outcome {
                rows,
                tstar: Some(tstar),
            }
        } else {
            log::info!("running preset {preset} ({} points)", preset.points().len());
            Outcome {
                rows: eval_points(&preset.points(), &settings, runner)?,
                tstar: None,
            }
        }
    } else if find {
        let n = cfg.n.ok_or_else(|| usage("--find-tstar needs --n"))?;
        let bound = tstar_bound(cfg)?;
        let ts = match cfg.sweep_t {
            Some(range) => range.values(),
            None => (2..=(n / 2).min(256) as u32).collect(),
        };
        log::info!("T* search over {} coherence times with {bound}", ts.len());
        let rows = sweep_t(snr_db, n, epsilon, &ts, &[bound], &settings, runner)?;
        let tstar = find_tstar(&rows)?;
        Outcome {
            rows,
            tstar: Some(tstar),
        }
    } else if let Some(range) = cfg.sweep_t {
        let n = cfg.n.ok_or_else(|| usage("--sweep-T needs --n"))?;
        Outcome {
            rows: sweep_t(snr_db, n, epsilon, &range.values(), bounds(cfg)?, &settings, runner)?,
            tstar: None,
        }
    } else if let Some(ns) = &cfg.sweep_n {
        let t = cfg.t.ok_or_else(|| usage("--sweep-n needs --T"))?;
        Outcome {
            rows: sweep_n(snr_db, t, epsilon, ns, bounds(cfg)?, &settings, runner)?,
            tstar: None,
        }
    } else {
        let bounds = bounds(cfg)?;
        let t = match cfg.t {
            Some(t) => t,
            None if bounds.iter().all(|&b| b == Bound::CCoh) => 1,
            None => return Err(usage("--T is required for this bound")),
        };
        let points: Vec<Point> = bounds
            .iter()
            .map(|&bound| Point {
                snr_db,
                t,
                n: cfg.n,
                epsilon,
                bound,
            })
            .collect();
        Outcome {
            rows: eval_points(&points, &settings, runner)?,
            tstar: None,
        }
    };
    for v in ordering_violations(&outcome.rows) {
        log::warn!("ordering violated: {v}");
    }
    if let Some(w) = outcome.tstar.as_ref().and_then(|t| t.flatness_warning.as_ref()) {
        log::warn!("{w}");
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use blockfade_core::Sequential;

    #[test]
    fn coherent_capacity_point_needs_no_t() {
        let cfg = Config {
            bounds: Some(vec![Bound::CCoh]),
            ..Config::default()
        };
        let out = run(&cfg, &Sequential).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].t, 1);
        assert!((out.rows[0].rate_bits_per_cu - 2.906_514_8).abs() < 1e-6);
    }

    #[test]
    fn missing_pieces_are_usage_errors() {
        let none = Config::default();
        assert!(matches!(run(&none, &Sequential), Err(CliError::Usage(_))));
        let sweep = Config {
            bounds: Some(vec![Bound::L]),
            sweep_t: Some("2:4".parse().unwrap()),
            ..Config::default()
        };
        assert!(matches!(run(&sweep, &Sequential), Err(CliError::Usage(_))));
        let exact = Config {
            exact: Some(true),
            bounds: Some(vec![Bound::L]),
            t: Some(4),
            ..Config::default()
        };
        assert!(matches!(run(&exact, &Sequential), Err(CliError::Usage(_))));
        let clash = Config {
            find_tstar: Some(true),
            exact: Some(true),
            bounds: Some(vec![Bound::L]),
            n: Some(100),
            ..Config::default()
        };
        assert!(matches!(run(&clash, &Sequential), Err(CliError::Usage(_))));
    }

    #[test]
    fn tstar_of_lower_bound_sits_at_top_of_range() {
        // L(ρ) increases with T, so the maximizer is the largest T swept.
        let cfg = Config {
            find_tstar: Some(true),
            bounds: Some(vec![Bound::L]),
            n: Some(400),
            sweep_t: Some("2:12:2".parse().unwrap()),
            ..Config::default()
        };
        let out = run(&cfg, &Sequential).unwrap();
        assert_eq!(out.tstar.unwrap().t, 12);
        assert_eq!(out.rows.len(), 6);
    }

    #[test]
    fn sweep_n_rows_ascend() {
        let cfg = Config {
            t: Some(10),
            sweep_n: Some(vec![1000, 100, 400]),
            bounds: Some(vec![Bound::NaCoh, Bound::Fano]),
            ..Config::default()
        };
        let rows = run(&cfg, &Sequential).unwrap().rows;
        let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![100, 100, 400, 400, 1000, 1000]);
    }
}
