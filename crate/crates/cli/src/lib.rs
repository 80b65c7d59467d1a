//! Command-line front-end for `blockfade-core`: single-point evaluation,
//! sweeps over the coherence time or the block-length, T* search, figure
//! presets and CSV output.
//!
//! Rates are computed in nats and converted to bits per channel use only
//! when rows are produced.

#![deny(unsafe_code)]
#![warn(missing_docs)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod bound;
pub mod config;
mod error;
pub mod eval;
pub mod preset;
pub mod row;
pub mod runner;

pub use app::{run, Outcome};
pub use bound::Bound;
pub use config::{Args, Config};
pub use error::{CliError, Result};
pub use eval::{eval_point, find_tstar, sweep_n, sweep_t, Point, Settings, TRange, TStar};
pub use preset::Preset;
pub use row::{emit_csv, parse_csv, read_csv, write_csv, SweepRow, HEADER};
pub use runner::RayonRunner;
