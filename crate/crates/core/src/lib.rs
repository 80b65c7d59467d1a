//! Finite block-length rate bounds for the noncoherent Rayleigh block-fading
//! channel.
//!
//! Within each coherence interval of `T` channel uses the channel acts as
//! `y = s·x + w` with `s ~ CN(0, 1)` and `w ~ CN(0, I_T)`, and neither end
//! knows the fading realization. This crate evaluates:
//!
//! * the infinite block-length quantities: the i.d. unitary lower bound
//!   `L(ρ)`, the duality upper bound `U(ρ)`, and the coherent capacity and
//!   dispersion ([`asymptotic`]);
//! * the finite block-length bounds: the Fano converse, the dependence-testing
//!   (DT) achievability bound and the normal approximations ([`fbl`]);
//! * the Monte Carlo machinery behind them, with substreams that make every
//!   estimate bit-reproducible regardless of how chunks are scheduled
//!   ([`mc`]).
//!
//! All rates are in nats per channel use. Conversion to bits is left to the
//! caller.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! injected through [`mc::ChunkRunner`].

#![no_std]
#![deny(unsafe_code)]
#![warn(missing_docs)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotic;
pub mod channel;
mod error;
pub mod fbl;
pub mod mc;
pub mod optim;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};

pub use asymptotic::{
    coherent_capacity, coherent_dispersion, lower_bound_l, upper_bound_u, QuadratureSpec,
    UpperBoundDiagnostics,
};
pub use channel::{ChannelParams, InfoDensitySamples, OutputSufficientStats};
pub use fbl::{
    dt_epsilon, dt_rate, fano_upper, normal_approx_coh, normal_approx_noncoh, vbar_estimate,
    DtSearchResult, FblSpec,
};
pub use mc::{ChunkRunner, McEstimate, Sequential};
pub use specfun::Tolerance;
