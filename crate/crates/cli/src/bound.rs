//! The bound selector shared by flags, config files and CSV.

use std::fmt;
use std::str::FromStr;

/// Rate bound or approximation selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    /// Asymptotic lower bound `L(ρ)`.
    L,
    /// Asymptotic duality upper bound `U(ρ)`.
    U,
    /// Coherent capacity.
    CCoh,
    /// Fano converse built on `U(ρ)`.
    Fano,
    /// Dependence-testing achievability bound.
    Dt,
    /// Normal approximation with perfect channel knowledge.
    NaCoh,
    /// Normal approximation for the noncoherent channel.
    NaNoncoh,
}

impl Bound {
    /// Every bound, in CSV order.
    pub const ALL: [Bound; 7] = [
        Bound::L,
        Bound::U,
        Bound::CCoh,
        Bound::Fano,
        Bound::Dt,
        Bound::NaCoh,
        Bound::NaNoncoh,
    ];

    /// Token used in flags, config files and CSV.
    pub fn name(self) -> &'static str {
        match self {
            Bound::L => "L",
            Bound::U => "U",
            Bound::CCoh => "C_coh",
            Bound::Fano => "fano",
            Bound::Dt => "dt",
            Bound::NaCoh => "na_coh",
            Bound::NaNoncoh => "na_noncoh",
        }
    }

    /// Bounds whose value carries Monte Carlo error.
    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Bound::Dt | Bound::NaNoncoh)
    }

    /// Bounds defined only for the noncoherent model, which needs `T ≥ 2`.
    pub fn needs_noncoherent_model(self) -> bool {
        !matches!(self, Bound::CCoh | Bound::NaCoh)
    }

    /// Bounds that do not depend on the block-length.
    pub fn is_asymptotic(self) -> bool {
        matches!(self, Bound::L | Bound::U | Bound::CCoh)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Bound::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Bound::ALL.iter().map(|b| b.name()).collect();
                format!("unknown bound `{s}` (expected one of {})", names.join(", "))
            })
    }
}
