//! A Bernoulli measure on blocks of length `m` that favors constant blocks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::seqcore::rational_f64;

/// Measures that can evaluate cylinders.
pub trait CylinderMeasure {
    /// Natural log of the mass of the cylinder `[prefix]`.
    fn log_mass(&self, prefix: &[u8]) -> Result<f64>;

    /// `log_mass` of `prefix[..n]` for each `n` in the increasing list `at`.
    fn log_mass_trace(&self, prefix: &[u8], at: &[usize]) -> Result<Vec<f64>> {
        at.iter().map(|&n| self.log_mass(&prefix[..n])).collect()
    }
}

/// Product measure on consecutive length-`m` blocks: weight `p` for each of
/// `0^m` and `1^m`, and `(1 - 2p)/(2^m - 2)` for every other block.
///
/// At `p = 1/3` the mixed weight equals `p/(2^m - 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockBernoulliMeasure {
    m: u32,
    p: BigRational,
    mixed: BigRational,
    ln_p: f64,
    ln_mixed: f64,
}

impl BlockBernoulliMeasure {
    pub fn new(m: u32, p: BigRational) -> Result<Self> {
        if !(2..=62).contains(&m) {
            return Err(Error::domain(format!("block length must lie in [2, 62], got {m}")));
        }
        let half = BigRational::new(1.into(), 2.into());
        if p <= BigRational::zero() || p > half {
            return Err(Error::domain("constant-block weight must lie in (0, 1/2]"));
        }
        let two = BigRational::from_integer(2.into());
        let mixed_count = BigRational::from_integer(BigInt::from((1u64 << m) - 2));
        let mixed = (BigRational::one() - &two * &p) / mixed_count;
        let ln_p = rational_f64(&p).ln();
        let ln_mixed = if mixed.is_zero() {
            f64::NEG_INFINITY
        } else {
            rational_ln(&mixed)
        };
        Ok(BlockBernoulliMeasure {
            m,
            p,
            mixed,
            ln_p,
            ln_mixed,
        })
    }

    /// `p = 1/3`.
    pub fn with_default_weight(m: u32) -> Result<Self> {
        Self::new(m, BigRational::new(1.into(), 3.into()))
    }

    pub fn block_length(&self) -> u32 {
        self.m
    }

    pub fn constant_weight(&self) -> &BigRational {
        &self.p
    }

    pub fn mixed_weight(&self) -> &BigRational {
        &self.mixed
    }

    /// Sum of the weights of all `2^m` blocks.
    pub fn block_total(&self) -> BigRational {
        let two = BigRational::from_integer(2.into());
        let mixed_count = BigRational::from_integer(BigInt::from((1u64 << self.m) - 2));
        &two * &self.p + mixed_count * &self.mixed
    }

    fn is_constant(block: &[u8]) -> bool {
        block.iter().all(|&b| b == block[0])
    }

    /// Mass of the cylinder of a proper prefix `u` of one block, summed over
    /// its completions.
    fn partial_block(&self, u: &[u8]) -> BigRational {
        let free = self.m as usize - u.len();
        let completions = BigRational::from_integer(BigInt::one() << free);
        if u.is_empty() {
            BigRational::one()
        } else if Self::is_constant(u) {
            &self.p + (completions - BigRational::one()) * &self.mixed
        } else {
            completions * &self.mixed
        }
    }

    pub fn nu_measure_exact(&self, w: &[u8]) -> BigRational {
        let m = self.m as usize;
        let mut mass = BigRational::one();
        let full = w.len() / m;
        for block in w[..full * m].chunks(m) {
            mass *= if Self::is_constant(block) { &self.p } else { &self.mixed };
        }
        mass * self.partial_block(&w[full * m..])
    }

    /// `(constant blocks, mixed blocks)` among the complete blocks of `w`.
    pub fn block_counts(&self, w: &[u8]) -> (u64, u64) {
        let m = self.m as usize;
        let full = w.len() / m;
        let constant = w[..full * m].chunks(m).filter(|b| Self::is_constant(b)).count() as u64;
        (constant, full as u64 - constant)
    }

    pub fn nu_log_measure(&self, w: &[u8]) -> f64 {
        let (c, x) = self.block_counts(w);
        let m = self.m as usize;
        let rem = &w[(w.len() / m) * m..];
        let mixed_part = if x == 0 { 0.0 } else { x as f64 * self.ln_mixed };
        c as f64 * self.ln_p + mixed_part + rational_ln(&self.partial_block(rem))
    }
}

impl CylinderMeasure for BlockBernoulliMeasure {
    fn log_mass(&self, prefix: &[u8]) -> Result<f64> {
        Ok(self.nu_log_measure(prefix))
    }

    fn log_mass_trace(&self, prefix: &[u8], at: &[usize]) -> Result<Vec<f64>> {
        let m = self.m as usize;
        let mut out = Vec::with_capacity(at.len());
        let (mut c, mut x) = (0u64, 0u64);
        let mut done = 0;
        for &n in at {
            while done + m <= n {
                if Self::is_constant(&prefix[done..done + m]) {
                    c += 1;
                } else {
                    x += 1;
                }
                done += m;
            }
            let mixed_part = if x == 0 { 0.0 } else { x as f64 * self.ln_mixed };
            out.push(c as f64 * self.ln_p + mixed_part + rational_ln(&self.partial_block(&prefix[done..n])));
        }
        Ok(out)
    }
}

/// Natural log of a positive rational whose parts may exceed `f64` range.
fn rational_ln(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return rational_f64(&BigRational::from_integer(x.clone())).ln();
    }
    let shift = bits - 900;
    let top: BigInt = x >> shift;
    rational_f64(&BigRational::from_integer(top)).ln() + shift as f64 * std::f64::consts::LN_2
}
