//! Points with `liminf F_m = alpha` and `limsup F_m = beta`.
//!
//! Zero runs occupy `[(1+l) theta_k, theta_{k+1}]` with
//! `theta_k = (1 + l + m)^k theta_0`, so that each cycle adds a free stretch
//! of relative length `l` followed by one long block of relative length `m`.

use std::sync::Arc;

use super::{ConstructedPoint, FreeBits, GridRule, IntervalSet, PointMeta, RuleSource, MAX_HORIZON};
use crate::error::{Error, Result};

const MAX_CYCLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointParameters {
    /// `l = (sqrt(beta) - sqrt(alpha)) / sqrt(alpha)`.
    pub ell: f64,
    /// `m = sqrt(beta/alpha) (beta + sqrt(alpha beta + beta - alpha)) / (1 - beta)`.
    pub m: f64,
}

impl JointParameters {
    pub fn growth(&self) -> f64 {
        1.0 + self.ell + self.m
    }
}

pub fn joint_parameters(alpha: f64, beta: f64) -> Result<JointParameters> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::Infeasible(format!(
            "cycle parameters need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}"
        )));
    }
    let (sa, sb) = (alpha.sqrt(), beta.sqrt());
    let s = (alpha * beta + beta - alpha).sqrt();
    Ok(JointParameters {
        ell: (sb - sa) / sa,
        m: (sb / sa) * (beta + s) / (1.0 - beta),
    })
}

/// Cycle data of the zero-run schedule.
#[derive(Clone, Debug)]
pub struct JointSchedule {
    pub theta0: u64,
    /// `theta_k`, as computed by repeated multiplication.
    pub thetas: Vec<f64>,
    /// Per-cycle `(l_k, m_k)`; constant unless `alpha = 0`.
    pub params: Vec<JointParameters>,
    pub runs: IntervalSet,
}

impl JointSchedule {
    pub fn build(alpha: f64, beta: f64, lambda: u64) -> Result<Self> {
        validate(alpha, beta, lambda)?;
        let cycle_params = |k: usize| -> Result<JointParameters> {
            if alpha > 0.0 {
                joint_parameters(alpha, beta)
            } else {
                let j = (k + 2) as f64;
                joint_parameters(beta / (j * j), beta)
            }
        };
        let p0 = cycle_params(0)?;
        let need = lambda as f64 + 2.0;
        let mut theta0 = (need / p0.m).floor().max(0.0) as u64 + 1;
        while p0.m * theta0 as f64 <= need {
            theta0 += 1;
        }
        let mut thetas = vec![theta0 as f64];
        let mut params = Vec::new();
        let mut runs = Vec::new();
        let mut theta = theta0 as f64;
        for k in 0..MAX_CYCLES {
            let p = if k == 0 { p0 } else { cycle_params(k)? };
            let next = theta * p.growth();
            let lo = ((1.0 + p.ell) * theta).ceil();
            if lo > MAX_HORIZON as f64 {
                return Ok(JointSchedule {
                    theta0,
                    thetas,
                    params,
                    runs: IntervalSet::new(runs),
                });
            }
            let hi = next.floor().min(MAX_HORIZON as f64);
            runs.push((lo as u64, hi as u64));
            params.push(p);
            thetas.push(next);
            theta = next;
        }
        Err(Error::Infeasible(format!(
            "schedule needs more than {MAX_CYCLES} cycles to cover the horizon"
        )))
    }
}

fn validate(alpha: f64, beta: f64, lambda: u64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Infeasible("targets must be finite".into()));
    }
    if !(0.0..beta).contains(&alpha) || !(beta < 1.0) {
        return Err(Error::Infeasible(format!(
            "targets need 0 <= alpha < beta < 1, got alpha={alpha}, beta={beta} \
             (use the bounded-block point for beta = 0)"
        )));
    }
    if lambda < 4 {
        return Err(Error::Infeasible(format!("lambda must be at least 4, got {lambda}")));
    }
    Ok(())
}

pub fn joint_spectrum_point(alpha: f64, beta: f64, lambda: u64, seed: u64) -> Result<ConstructedPoint> {
    let sched = JointSchedule::build(alpha, beta, lambda)?;
    let (ell, m) = if alpha > 0.0 {
        (Some(sched.params[0].ell), Some(sched.params[0].m))
    } else {
        (None, None)
    };
    let meta = PointMeta::Joint {
        alpha,
        beta,
        lambda,
        seed,
        ell,
        m,
        theta0: sched.theta0,
    };
    let runs = Arc::new(sched.runs);
    let rule = GridRule {
        zeros: runs.clone(),
        lambda,
        fix_first: true,
    };
    let source = Arc::new(RuleSource {
        rule,
        free: FreeBits::new(seed),
    });
    Ok(ConstructedPoint::new(meta, source.clone(), source, Some(runs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{DeterminedPositions, PositionRole};
    use crate::seqcore::SymbolSource;
    use crate::spectrum::{joint_dim, SpectrumPoint};

    #[test]
    fn parameters_at_quarter_half() {
        let p = joint_parameters(0.25, 0.5).unwrap();
        assert!((p.ell - 0.41421).abs() < 1e-5);
        assert!((p.m - 3.14626).abs() < 1e-5);
        let f = joint_dim(SpectrumPoint::new(0.25, 0.5).unwrap());
        assert!((p.ell / (p.ell + p.m) - f).abs() < 1e-12);
        let g = p.growth();
        assert!((p.m * p.m + 0.5 - 0.5 * g * g).abs() < 1e-10);
    }

    #[test]
    fn theta0_is_minimal() {
        let s = JointSchedule::build(0.25, 0.5, 64).unwrap();
        let m = s.params[0].m;
        assert!(m * s.theta0 as f64 > 66.0);
        assert!(m * (s.theta0 - 1) as f64 <= 66.0);
    }

    #[test]
    fn infeasible_targets() {
        for (a, b) in [(0.5, 0.5), (0.2, 1.0), (0.0, 0.0), (0.6, 0.5), (-0.1, 0.5)] {
            assert!(matches!(joint_spectrum_point(a, b, 64, 1), Err(Error::Infeasible(_))));
        }
        assert!(joint_spectrum_point(0.25, 0.5, 3, 1).is_err());
    }

    #[test]
    fn prescribed_bits_hold() {
        let p = joint_spectrum_point(0.25, 0.5, 16, 9).unwrap();
        let bits = p.window(0, 50_000);
        for (i, &b) in bits.iter().enumerate() {
            let n = i as u64 + 1;
            if let Some(v) = p.prescribed(n) {
                assert_eq!(b, v, "position {n}");
            }
            assert_eq!(p.bit(n), b);
        }
        assert_eq!(p.role(1), PositionRole::Fixed0);
    }

    #[test]
    fn long_blocks_follow_the_schedule() {
        let lambda = 16u64;
        let p = joint_spectrum_point(0.25, 0.5, lambda, 4).unwrap();
        let sched = JointSchedule::build(0.25, 0.5, lambda).unwrap();
        let horizon = 2_000_000usize;
        let code = p.prefix_code(horizon).unwrap();
        let large: Vec<u64> = code.blocks().iter().copied().filter(|&b| b >= lambda).collect();
        let m = sched.params[0].m;
        let runs = p.scheduled_runs(horizon as u64);
        let complete: Vec<_> = runs.iter().filter(|r| r.1 < horizon as u64 - 2 * lambda).collect();
        assert!(complete.len() >= 5);
        for (k, &len) in large.iter().take(complete.len()).enumerate() {
            let target = m * sched.thetas[k];
            assert!(len as f64 >= target - 2.0 && len as f64 <= target + 2.0 * lambda as f64, "k={k}");
        }
    }

    #[test]
    fn zero_alpha_schedule() {
        let p = joint_spectrum_point(0.0, 0.3, 16, 5).unwrap();
        let runs = p.scheduled_runs(1 << 40);
        assert!(runs.len() >= 4);
        assert!(runs.windows(2).all(|w| w[0].1 < w[1].0));
    }
}
