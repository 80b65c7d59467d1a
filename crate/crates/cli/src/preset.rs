//! Parameter grids of the four reproduced figures.

use std::fmt;
use std::str::FromStr;

use crate::bound::Bound;
use crate::eval::Point;

/// Figure-reproduction grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `L`, `U` and `C_coh` against `T` at 10 dB.
    Fig1,
    /// Finite block-length bounds against `n` at `T = 50`.
    Fig2,
    /// Bounds against `T` at `n = 4000`.
    Fig3,
    /// Bounds against `T` at `n = 40000`.
    Fig4,
}

/// SNR shared by every preset.
pub const PRESET_SNR_DB: f64 = 10.0;
/// Error probability shared by the finite block-length presets.
pub const PRESET_EPSILON: f64 = 1e-3;

impl Preset {
    /// Bounds plotted in the figure.
    pub fn bounds(self) -> &'static [Bound] {
        match self {
            Preset::Fig1 => &[Bound::L, Bound::U, Bound::CCoh],
            Preset::Fig2 => &[Bound::Fano, Bound::Dt, Bound::NaNoncoh, Bound::NaCoh, Bound::CCoh],
            Preset::Fig3 | Preset::Fig4 => &[Bound::Fano, Bound::Dt, Bound::NaCoh, Bound::CCoh],
        }
    }

    /// Fixed block-length of the T-sweep figures.
    pub fn block_length(self) -> Option<usize> {
        match self {
            Preset::Fig3 => Some(4000),
            Preset::Fig4 => Some(40_000),
            _ => None,
        }
    }

    /// Coherence times on the horizontal axis (`T = 50` only for fig2).
    pub fn t_grid(self) -> Vec<u32> {
        let mut ts: Vec<u32> = match self {
            Preset::Fig1 | Preset::Fig3 => (2..=10).chain((12..=200).step_by(2)).collect(),
            Preset::Fig2 => vec![50],
            Preset::Fig4 => [2, 4]
                .into_iter()
                .chain((8..=400).step_by(8))
                .chain((56..=72).step_by(2))
                .collect(),
        };
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    /// Block-lengths on the horizontal axis of fig2.
    pub fn n_grid(self) -> Vec<usize> {
        match self {
            Preset::Fig2 => vec![100, 200, 500, 1000, 2000, 4000, 10_000, 20_000, 40_000],
            _ => self.block_length().into_iter().collect(),
        }
    }

    /// Every point of the figure in output order.
    pub fn points(self) -> Vec<Point> {
        let mut points = Vec::new();
        match self {
            Preset::Fig2 => {
                for n in self.n_grid() {
                    for &bound in self.bounds() {
                        points.push(Point {
                            snr_db: PRESET_SNR_DB,
                            t: 50,
                            n: Some(n),
                            epsilon: PRESET_EPSILON,
                            bound,
                        });
                    }
                }
            }
            _ => {
                for t in self.t_grid() {
                    for &bound in self.bounds() {
                        points.push(Point {
                            snr_db: PRESET_SNR_DB,
                            t,
                            n: self.block_length(),
                            epsilon: PRESET_EPSILON,
                            bound,
                        });
                    }
                }
            }
        }
        points
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        })
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(format!("unknown preset `{s}` (expected fig1, fig2, fig3 or fig4)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_spans_two_to_two_hundred() {
        let ts = Preset::Fig1.t_grid();
        assert_eq!(ts.first(), Some(&2));
        assert!(*ts.last().unwrap() >= 200);
        assert!(Preset::Fig1.points().iter().all(|p| p.n.is_none() && p.bound.is_asymptotic()));
    }

    #[test]
    fn fig2_pairs_dt_with_fano() {
        let pts = Preset::Fig2.points();
        for n in Preset::Fig2.n_grid() {
            assert_eq!(n % 50, 0);
            let at: Vec<Bound> = pts.iter().filter(|p| p.n == Some(n)).map(|p| p.bound).collect();
            assert!(at.contains(&Bound::Dt) && at.contains(&Bound::Fano));
        }
    }

    #[test]
    fn fig4_contains_sixty_four() {
        assert!(Preset::Fig4.points().iter().any(|p| p.t == 64 && p.n == Some(40_000)));
        assert!(Preset::Fig3.t_grid().contains(&28));
    }

    #[test]
    fn t_grids_stay_within_half_the_block_length() {
        for p in [Preset::Fig3, Preset::Fig4] {
            let n = p.block_length().unwrap();
            assert!(p.t_grid().iter().all(|&t| t >= 2 && t as usize <= n / 2));
            assert!(p.t_grid().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn names_parse() {
        for p in [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4] {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
        assert!("fig5".parse::<Preset>().is_err());
    }
}
