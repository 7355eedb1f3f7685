//! Midpoint rule for the partial Riesz products
//! `prod_{m<N} (1 - cos 2 pi 2^m x) = prod_{m<N} 2 sin^2(pi 2^m x)`
//! over a dyadic interval.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{pow2_neg, Neumaier};
use crate::seqcore::BinaryWord;

const PANELS_PER_JOB: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub levels: usize,
    pub panels: u64,
    pub budget: u128,
}

impl QuadratureConfig {
    /// `q = 2^{N+4}` panels, enough to out-resolve the top frequency `2^N - 1`.
    pub fn recommended(levels: usize) -> Self {
        QuadratureConfig {
            levels,
            panels: 1u64 << (levels + 4).min(62),
            budget: super::DEFAULT_BUDGET,
        }
    }
}

/// `int_[w] prod_{m<N} (1 - cos 2 pi 2^m x) dx` on `q` equal panels.
pub fn riesz_quadrature(w: &BinaryWord, cfg: &QuadratureConfig) -> Result<f64> {
    let n = w.len();
    let q = cfg.panels;
    if cfg.levels < n {
        return Err(Error::domain("the number of levels must be at least the word length"));
    }
    if q == 0 || !q.is_power_of_two() {
        return Err(Error::domain(format!("panel count {q} is not a power of two")));
    }
    let log_q = q.trailing_zeros() as usize;
    // midpoints are odd multiples of 2^-e
    let e = n + log_q + 1;
    if e > 127 || cfg.levels > 127 {
        return Err(Error::domain("word, levels and panels exceed exact dyadic range"));
    }
    let needed = (cfg.levels as u128).saturating_mul(q as u128);
    if needed > cfg.budget {
        return Err(Error::Budget {
            needed,
            budget: cfg.budget,
        });
    }
    let mut a: u128 = 0;
    for &b in w.bits() {
        a = (a << 1) | b as u128;
    }
    let base = a << (log_q + 1);
    let mask: u128 = if e == 128 { u128::MAX } else { (1u128 << e) - 1 };
    let inv = pow2_neg_u(e);
    let levels = cfg.levels;
    let jobs = q.div_ceil(PANELS_PER_JOB);
    let partial: Vec<f64> = (0..jobs)
        .into_par_iter()
        .map(|job| {
            let mut acc = Neumaier::new();
            let lo = job * PANELS_PER_JOB;
            let hi = (lo + PANELS_PER_JOB).min(q);
            for j in lo..hi {
                let mut v = base + 2 * j as u128 + 1;
                let mut prod = 1.0;
                for _ in 0..levels {
                    let y = v as f64 * inv;
                    let s = (PI * y.min(1.0 - y)).sin();
                    prod *= 2.0 * s * s;
                    v = (v << 1) & mask;
                }
                acc.add(prod);
            }
            acc.total()
        })
        .collect();
    let mut total = Neumaier::new();
    for p in partial {
        total.add(p);
    }
    let h = pow2_neg_u(n + log_q);
    Ok(total.total() * h)
}

fn pow2_neg_u(e: usize) -> f64 {
    pow2_neg(e as u32)
}
