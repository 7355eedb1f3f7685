//! Trajectories of the normalized counters and finite-horizon proxies for
//! their liminf and limsup.

mod convexity;
mod counters;
mod density;
mod xi;

pub use convexity::{convexity_identity_check, convexity_sweep, ConvexitySweep, RhoCase};
pub use counters::{f_trajectory, interpolated_f_lambda, CounterTrajectories};
pub use density::{large_block_density, local_dimension_trace, prop64_check};
pub use xi::{fig2_enclosures, sample_grid, xi_mu_trajectory, xi_psi_trajectory, Fig2Row, SampleGrid};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::LogBound;

/// Which normalized quantity a trajectory holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Normalization {
    /// `(f_m + s^2) / n^2`, indexed by position.
    XiMu,
    /// `(f_{m+1} - r^2) / n^2`, indexed by position.
    XiPsi,
    /// `F_m`, indexed by block.
    F,
    FLambda { lambda: u64 },
    Ell { lambda: u64 },
    Rho { lambda: u64 },
    /// `log nu(C_n) / (-n log 2)`, indexed by position.
    LocalDimension,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub index: u128,
    pub value: f64,
    pub bound: Option<LogBound>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub normalization: Normalization,
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(normalization: Normalization, samples: Vec<Sample>) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(Error::domain("trajectory indices must be strictly increasing"));
        }
        Ok(Trajectory { normalization, samples })
    }

    pub(crate) fn from_points(normalization: Normalization, points: Vec<(u128, f64)>) -> Self {
        let samples = points
            .into_iter()
            .map(|(index, value)| Sample {
                index,
                value,
                bound: None,
            })
            .collect();
        Trajectory { normalization, samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    /// Value at an exact index, if sampled.
    pub fn at(&self, index: u128) -> Option<f64> {
        self.samples
            .binary_search_by_key(&index, |s| s.index)
            .ok()
            .map(|i| self.samples[i].value)
    }

    /// Samples with `lo <= index <= hi`.
    pub fn restricted(&self, lo: u128, hi: u128) -> Trajectory {
        Trajectory {
            normalization: self.normalization.clone(),
            samples: self.samples.iter().copied().filter(|s| s.index >= lo && s.index <= hi).collect(),
        }
    }
}

/// Tail-window extrema; a finite-horizon stand-in for liminf and limsup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub liminf_hat: f64,
    pub limsup_hat: f64,
    /// First and last index of the window.
    pub window: [u128; 2],
}

/// Minimum and maximum over the trailing `tail_fraction` of the samples.
pub fn limit_estimates(traj: &Trajectory, tail_fraction: f64) -> Result<LimitEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::domain(format!("tail fraction must lie in (0, 1), got {tail_fraction}")));
    }
    let n = traj.samples.len();
    let take = ((n as f64) * tail_fraction).ceil() as usize;
    if take == 0 {
        return Err(Error::domain("empty trajectory window"));
    }
    window_extrema(&traj.samples[n - take..])
}

/// Extrema over every sample of `traj`.
pub fn extrema(traj: &Trajectory) -> Result<LimitEstimate> {
    window_extrema(&traj.samples)
}

fn window_extrema(window: &[Sample]) -> Result<LimitEstimate> {
    let (first, last) = match (window.first(), window.last()) {
        (Some(a), Some(b)) => (a.index, b.index),
        _ => return Err(Error::domain("empty trajectory window")),
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in window {
        lo = lo.min(s.value);
        hi = hi.max(s.value);
    }
    Ok(LimitEstimate {
        liminf_hat: lo,
        limsup_hat: hi,
        window: [first, last],
    })
}
