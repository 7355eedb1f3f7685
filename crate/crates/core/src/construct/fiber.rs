//! The uniform measure on the fiber of points that agree with a prescribed
//! pattern on the determined positions.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{CylinderMeasure, DeterminedPositions, PositionRole};
use crate::error::{Error, Result};

/// Positions described by a closure returning the prescribed bit, if any.
pub struct PredicatePositions<F> {
    f: F,
}

impl<F: Fn(u64) -> Option<u8> + Send + Sync> PredicatePositions<F> {
    pub fn new(f: F) -> Self {
        PredicatePositions { f }
    }
}

impl<F: Fn(u64) -> Option<u8> + Send + Sync> DeterminedPositions for PredicatePositions<F> {
    fn role(&self, n: u64) -> PositionRole {
        match (self.f)(n) {
            Some(0) => PositionRole::Fixed0,
            Some(_) => PositionRole::PairOne,
            None => PositionRole::Free,
        }
    }
}

/// `nu(C_n(x)) = 2^{-c_n}` with `c_n` the number of free positions in
/// `[1, n]`, for `x` compatible with the prescription, and 0 otherwise.
#[derive(Clone)]
pub struct FiberMeasure {
    positions: Arc<dyn DeterminedPositions>,
}

pub fn fiber_measure(positions: Arc<dyn DeterminedPositions>) -> FiberMeasure {
    FiberMeasure { positions }
}

impl FiberMeasure {
    /// Number of free positions in `[1, prefix.len()]`, or the first
    /// position where `prefix` breaks the prescription.
    pub fn free_count(&self, prefix: &[u8]) -> std::result::Result<u64, u64> {
        let mut free = 0;
        for (i, &b) in prefix.iter().enumerate() {
            let n = i as u64 + 1;
            match self.positions.prescribed(n) {
                Some(p) if p != b => return Err(n),
                Some(_) => {}
                None => free += 1,
            }
        }
        Ok(free)
    }

    pub fn mass_exact(&self, prefix: &[u8]) -> BigRational {
        match self.free_count(prefix) {
            Ok(c) => BigRational::new(BigInt::one(), BigInt::one() << c),
            Err(_) => BigRational::zero(),
        }
    }
}

impl CylinderMeasure for FiberMeasure {
    fn log_mass(&self, prefix: &[u8]) -> Result<f64> {
        match self.free_count(prefix) {
            Ok(c) => Ok(-(c as f64) * std::f64::consts::LN_2),
            Err(n) => Err(Error::Incompatible(n)),
        }
    }

    fn log_mass_trace(&self, prefix: &[u8], at: &[usize]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(at.len());
        let mut free = 0u64;
        let mut j = 0;
        for (i, &b) in prefix.iter().enumerate() {
            let n = i as u64 + 1;
            match self.positions.prescribed(n) {
                Some(p) if p != b => return Err(Error::Incompatible(n)),
                Some(_) => {}
                None => free += 1,
            }
            while j < at.len() && at[j] == i + 1 {
                out.push(-(free as f64) * std::f64::consts::LN_2);
                j += 1;
            }
        }
        Ok(out)
    }
}

/// `1 - max_{n in window} #(M ∩ [1, n]) / n` over the window
/// `[ceil((1 - tail) horizon), horizon]`.
pub fn fiber_dimension_bound(positions: &dyn DeterminedPositions, horizon: u64, tail: f64) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::domain("horizon must be positive"));
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::domain(format!("tail fraction must lie in (0, 1], got {tail}")));
    }
    let start = (((1.0 - tail) * horizon as f64).ceil() as u64).max(1);
    let mut count = 0u64;
    let mut best = 0.0f64;
    for n in 1..=horizon {
        if positions.is_determined(n) {
            count += 1;
        }
        if n >= start {
            best = best.max(count as f64 / n as f64);
        }
    }
    Ok(1.0 - best)
}
