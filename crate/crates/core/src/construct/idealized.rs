//! Real-arithmetic model of the block schedule: free stretches that let the
//! filtered ratio decay, each followed by one block that restores it.

use crate::error::{Error, Result};
use crate::spectrum::{joint_dim, SpectrumPoint};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleTrace {
    /// Length at the start of the cycle, where the filtered ratio is `beta`.
    pub n_r: f64,
    /// Length after the free stretch, ratio `alpha`.
    pub n_prev: f64,
    /// Length after the large block, ratio back at `beta`.
    pub n_k: f64,
    /// `(n_prev - n_r) / (n_k - n_r)`.
    pub ratio: f64,
}

/// Positive root of `(Q + n^2) = beta (N + n)^2`, the block that brings the
/// ratio from `Q/N^2 < beta` up to `beta`.
fn restoring_block(q: f64, n: f64, beta: f64) -> f64 {
    let b = beta * n;
    let c = q - beta * n * n;
    let disc = b * b - (1.0 - beta) * c;
    (b + disc.sqrt()) / (1.0 - beta)
}

pub fn idealized_block_simulation(alpha: f64, beta: f64, steps: usize) -> Result<Vec<CycleTrace>> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::domain(format!(
            "simulation needs 0 < alpha < beta < 1, got ({alpha}, {beta})"
        )));
    }
    let mut out = Vec::with_capacity(steps);
    let mut n_r = 1.0f64;
    let mut q = beta;
    for _ in 0..steps {
        // small blocks leave Q unchanged until Q / N^2 = alpha
        let n_prev = (q / alpha).sqrt();
        let block = restoring_block(q, n_prev, beta);
        let n_k = n_prev + block;
        if !n_k.is_finite() {
            return Err(Error::Numeric("cycle lengths overflowed".into()));
        }
        out.push(CycleTrace {
            n_r,
            n_prev,
            n_k,
            ratio: (n_prev - n_r) / (n_k - n_r),
        });
        q += block * block;
        n_r = n_k;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotTrace {
    /// Filtered ratio before the large block.
    pub alpha_k: f64,
    pub n_prev: f64,
    /// `sqrt(alpha_k / beta) n_prev`.
    pub pivot: f64,
    pub n_k: f64,
    pub ratio: f64,
    /// `f(alpha_k, beta)`.
    pub expected: f64,
}

/// Starting from a filtered prefix with length `n0` and square sum `q0`,
/// each cycle stretches the length by the next padding factor using small
/// blocks only, then adds the block that restores the ratio `beta`.
pub fn pivot_block_simulation(beta: f64, n0: f64, q0: f64, paddings: &[f64]) -> Result<Vec<PivotTrace>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(n0 > 0.0 && q0 > 0.0) {
        return Err(Error::domain("initial prefix must have positive length and square sum"));
    }
    let (mut n, mut q) = (n0, q0);
    let mut out = Vec::with_capacity(paddings.len());
    for &pad in paddings {
        if !(pad >= 1.0) {
            return Err(Error::domain("padding factors must be at least 1"));
        }
        let n_prev = n * pad;
        let alpha_k = q / (n_prev * n_prev);
        if alpha_k >= beta {
            return Err(Error::domain(format!(
                "padding leaves the ratio at {alpha_k}, not below beta={beta}"
            )));
        }
        let block = restoring_block(q, n_prev, beta);
        let n_k = n_prev + block;
        let pivot = (alpha_k / beta).sqrt() * n_prev;
        out.push(PivotTrace {
            alpha_k,
            n_prev,
            pivot,
            n_k,
            ratio: (n_prev - pivot) / (n_k - pivot),
            expected: joint_dim(SpectrumPoint::new(alpha_k, beta)?),
        });
        q += block * block;
        n = n_k;
    }
    Ok(out)
}
