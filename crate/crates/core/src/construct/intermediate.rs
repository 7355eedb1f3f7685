//! Points with `f_m ~ alpha N_m^gamma` for `1 < gamma < 2`.
//!
//! A zero run of length `c_k = sqrt(r gamma alpha) k^delta`,
//! `delta = (r gamma - 1)/2`, ends at each `theta_k = k^r`.

use std::sync::Arc;

use super::{BlockSchedule, ConstructedPoint, FreeBits, GridRule, PointMeta, RuleSource, ZeroSchedule, MAX_HORIZON};
use crate::error::{Error, Result};

const K0_SCAN: u64 = 100_000;

/// `r = max(3, ceil(1/(2 - gamma)) + 1)`, an integer `r > 2` with `delta < r - 1`.
pub fn select_r(gamma: f64) -> u32 {
    // the tolerance keeps 1/(2 - 1.8) from rounding up past 5
    let inv = (1.0 / (2.0 - gamma) - 1e-9).ceil() as u32;
    inv.saturating_add(1).max(3)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateSchedule {
    pub r: u32,
    pub delta: f64,
    pub coefficient: f64,
    pub k0: u64,
}

impl IntermediateSchedule {
    pub fn build(gamma: f64, alpha: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(Error::Infeasible(format!("gamma must lie in (1, 2), got {gamma}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Infeasible(format!("alpha must be positive, got {alpha}")));
        }
        let r = select_r(gamma);
        let delta = (r as f64 * gamma - 1.0) / 2.0;
        let coefficient = (r as f64 * gamma * alpha).sqrt();
        let mut sched = IntermediateSchedule {
            r,
            delta,
            coefficient,
            k0: 1,
        };
        let mut last_fail = 0;
        let mut k = 1;
        while k <= K0_SCAN {
            let Some(t) = sched.theta(k) else { break };
            if t > MAX_HORIZON as u128 {
                break;
            }
            let gap = (t - sched.theta(k - 1).unwrap()) as f64;
            if sched.run_length(k) >= gap {
                last_fail = k;
            }
            k += 1;
        }
        if last_fail + 1 >= k {
            return Err(Error::Infeasible(format!(
                "run lengths c_k never fall below the gaps theta_k - theta_(k-1) for k <= {}",
                k - 1
            )));
        }
        sched.k0 = last_fail + 1;
        Ok(sched)
    }

    pub fn theta(&self, k: u64) -> Option<u128> {
        (k as u128).checked_pow(self.r)
    }

    /// `c_k`.
    pub fn run_length(&self, k: u64) -> f64 {
        self.coefficient * (k as f64).powf(self.delta)
    }

    /// `ceil(theta_k - c_k)`, computed exactly from the integer `theta_k`.
    pub fn run_start(&self, k: u64) -> Option<u64> {
        let t = self.theta(k)?;
        let c = self.run_length(k).floor() as u128;
        u64::try_from(t.saturating_sub(c).max(1)).ok()
    }

    /// Least `k` with `k^r >= n`.
    fn cycle_of(&self, n: u64) -> u64 {
        let mut k = (n as f64).powf(1.0 / self.r as f64).round() as u64;
        while self.theta(k).is_some_and(|t| t < n as u128) {
            k += 1;
        }
        while k > 0 && self.theta(k - 1).is_some_and(|t| t >= n as u128) {
            k -= 1;
        }
        k
    }
}

impl ZeroSchedule for IntermediateSchedule {
    fn contains(&self, n: u64) -> bool {
        let k = self.cycle_of(n);
        k >= self.k0 && self.run_start(k).is_some_and(|lo| n >= lo)
    }
}

impl BlockSchedule for IntermediateSchedule {
    fn intervals_up_to(&self, horizon: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut k = self.k0;
        while let (Some(lo), Some(hi)) = (self.run_start(k), self.theta(k)) {
            if lo > horizon || hi > MAX_HORIZON as u128 {
                break;
            }
            out.push((lo, hi as u64));
            k += 1;
        }
        out
    }
}

pub fn intermediate_scaling_point(gamma: f64, alpha: f64, lambda: u64, seed: u64) -> Result<ConstructedPoint> {
    if lambda < 4 {
        return Err(Error::Infeasible(format!("lambda must be at least 4, got {lambda}")));
    }
    let sched = Arc::new(IntermediateSchedule::build(gamma, alpha)?);
    let meta = PointMeta::Intermediate {
        gamma,
        alpha,
        lambda,
        seed,
        r: sched.r,
        delta: sched.delta,
        coefficient: sched.coefficient,
        k0: sched.k0,
    };
    let rule = GridRule {
        zeros: sched.clone(),
        lambda,
        fix_first: false,
    };
    let source = Arc::new(RuleSource {
        rule,
        free: FreeBits::new(seed),
    });
    Ok(ConstructedPoint::new(meta, source.clone(), source, Some(sched)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::DeterminedPositions;

    #[test]
    fn r_rule() {
        assert_eq!(select_r(1.5), 3);
        assert_eq!(select_r(1.1), 3);
        assert_eq!(select_r(1.8), 6);
        for g in [1.05, 1.3, 1.5, 1.7, 1.9, 1.99] {
            let r = select_r(g) as f64;
            let delta = (r * g - 1.0) / 2.0;
            assert!(r > 2.0 && delta < r - 1.0, "gamma={g}");
        }
    }

    #[test]
    fn schedule_at_three_halves() {
        let s = IntermediateSchedule::build(1.5, 1.0).unwrap();
        assert_eq!(s.r, 3);
        assert!((s.delta - 1.75).abs() < 1e-15);
        assert!((s.coefficient - 4.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.k0, 3);
        for k in s.k0..2000 {
            let gap = (s.theta(k).unwrap() - s.theta(k - 1).unwrap()) as f64;
            assert!(s.run_length(k) < gap);
        }
    }

    #[test]
    fn membership_agrees_with_intervals() {
        let s = IntermediateSchedule::build(1.5, 1.0).unwrap();
        let ivs = s.intervals_up_to(200_000);
        for n in 1..200_000u64 {
            let inside = ivs.iter().any(|&(lo, hi)| lo <= n && n <= hi);
            assert_eq!(s.contains(n), inside, "n={n}");
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(IntermediateSchedule::build(2.0, 1.0).is_err());
        assert!(IntermediateSchedule::build(1.0, 1.0).is_err());
        assert!(IntermediateSchedule::build(1.5, 0.0).is_err());
        assert!(intermediate_scaling_point(1.5, 1.0, 2, 0).is_err());
    }

    #[test]
    fn run_density_decays() {
        let p = intermediate_scaling_point(1.5, 1.0, 32, 1).unwrap();
        let density = |n: u64| (1..=n).filter(|&k| p.is_determined(k)).count() as f64 / n as f64;
        let (a, b) = (density(100_000), density(1_000_000));
        // runs thin out like k^(delta - r + 1) on top of the 2/lambda grid
        assert!(b < a && b > 2.0 / 32.0, "{a} {b}");
    }
}
