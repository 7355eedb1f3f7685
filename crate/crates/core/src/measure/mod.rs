//! The potential `psi = log g~ o pi_2`, enclosures of its Birkhoff sums and
//! cylinder-measure bounds and estimates for the Thue-Morse g-measure.
//!
//! Everything here works in natural logarithms.

mod estimate;
mod quadrature;

pub use estimate::{cylinder_measure_estimate, default_anchors, EstimateConfig, MeasureEstimate, DEFAULT_BUDGET};
pub use quadrature::{riesz_quadrature, QuadratureConfig};

use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{down, pow2_neg, up, Neumaier};
use crate::seqcore::{alternation_encode, AlternationCode, BinaryWord, SymbolSource};

pub const DEFAULT_LOOKAHEAD: usize = 64;
pub const MAX_LOOKAHEAD: usize = 900;

/// `ln(pi)`.
pub const LN_PI: f64 = 1.144_729_885_849_400_2;

/// A closed interval `[lo, hi]` of extended reals that is known to contain
/// some quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBound {
    pub lo: f64,
    pub hi: f64,
}

impl LogBound {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Numeric(format!("invalid enclosure [{lo}, {hi}]")));
        }
        Ok(LogBound { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        LogBound { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn strictly_contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }

    pub fn intersects(&self, other: &LogBound) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_bound(&self, other: &LogBound) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Interval sum, rounded outward.
    pub fn add(&self, other: &LogBound) -> LogBound {
        LogBound {
            lo: down(self.lo + other.lo, 1),
            hi: up(self.hi + other.hi, 1),
        }
    }

    /// Multiplication by a positive constant, rounded outward.
    pub fn scale(&self, c: f64) -> LogBound {
        assert!(c > 0.0);
        LogBound {
            lo: down(self.lo * c, 1),
            hi: up(self.hi * c, 1),
        }
    }

    /// `[a, b]` maps to `[-b, -a]`.
    pub fn neg(&self) -> LogBound {
        LogBound {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Display for LogBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo, self.hi)
    }
}

/// `g~(t) = (1 - cos 2 pi t) / 2`, evaluated as `sin^2(pi t)` on the nearer
/// half so that values near the zeros keep their relative accuracy.
pub fn g_tilde(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("g~ is defined on [0,1], got {t}")));
    }
    let d = t.min(1.0 - t);
    let s = (PI * d).sin();
    Ok(s * s)
}

/// Enclosure of `psi` at a point whose first `bits.len()` symbols are given.
pub fn psi_from_bits(bits: &[u8]) -> LogBound {
    let l = bits.len();
    debug_assert!(l >= 1);
    // distance to the nearer endpoint lies in [num, num + 1] / 2^e: its digits
    // are the symbols after the first, complemented when the first is a 1
    let flip = bits[0];
    let digit = |i: usize| bits[i] ^ flip;
    let zeros = (1..l).take_while(|&i| digit(i) == 0).count();
    if 1 + zeros == l {
        let d_hi = pow2_neg(l as u32);
        let hi = (2.0 * (PI * d_hi).ln()).min(0.0);
        return LogBound {
            lo: f64::NEG_INFINITY,
            hi: widen_up(hi),
        };
    }
    let e = l.min(1 + zeros + 63);
    let mut num: u64 = 0;
    for i in 1 + zeros..e {
        num = (num << 1) | digit(i) as u64;
    }
    let scale = pow2_neg(e as u32);
    let d_lo = down(num as f64, 1) * scale;
    let d_hi = (up((num as u128 + 1) as f64, 1) * scale).min(0.5);
    LogBound {
        lo: widen_down(2.0 * (PI * d_lo).sin().ln()),
        hi: widen_up(2.0 * (PI * d_hi).sin().ln()).min(0.0),
    }
}

fn widen_down(v: f64) -> f64 {
    v - (8.0 * f64::EPSILON + 4.0 * f64::EPSILON * v.abs())
}

fn widen_up(v: f64) -> f64 {
    v + (8.0 * f64::EPSILON + 4.0 * f64::EPSILON * v.abs())
}

fn check_lookahead(lookahead: usize) -> Result<()> {
    if !(2..=MAX_LOOKAHEAD).contains(&lookahead) {
        return Err(Error::domain(format!(
            "lookahead must lie in [2, {MAX_LOOKAHEAD}], got {lookahead}"
        )));
    }
    Ok(())
}

/// Enclosure of `psi(sigma^k x)` from the symbols `k+1 ..= k+L`.
pub fn psi_interval<S: SymbolSource + ?Sized>(src: &S, shift: u64, lookahead: usize) -> Result<LogBound> {
    check_lookahead(lookahead)?;
    Ok(psi_from_bits(&src.window(shift, lookahead)))
}

/// Enclosure of `S_n psi(x) = sum_{j<n} psi(sigma^j x)`.
pub fn birkhoff_sum<S: SymbolSource + ?Sized>(src: &S, n: usize, lookahead: usize) -> Result<LogBound> {
    check_lookahead(lookahead)?;
    if n == 0 {
        return Err(Error::domain("Birkhoff sums need n >= 1"));
    }
    let bits = src.window(0, n + lookahead - 1);
    let (mut lo, mut hi) = (Neumaier::new(), Neumaier::new());
    let (mut abs_lo, mut abs_hi) = (0.0, 0.0);
    let mut singular = false;
    for j in 0..n {
        let b = psi_from_bits(&bits[j..j + lookahead]);
        if b.lo == f64::NEG_INFINITY {
            singular = true;
        } else {
            lo.add(b.lo);
            abs_lo += b.lo.abs();
        }
        hi.add(b.hi);
        abs_hi += b.hi.abs();
    }
    let slack = |abs: f64| 4.0 * f64::EPSILON * abs + f64::MIN_POSITIVE;
    let lo = if singular {
        f64::NEG_INFINITY
    } else {
        lo.total() - slack(abs_lo)
    };
    Ok(LogBound {
        lo,
        hi: hi.total() + slack(abs_hi),
    })
}

/// Exact leading term of the block form of `S_n psi`: for
/// `N_m <= n < N_{m+1}` this is `f_{m+1} - r^2` with `r = N_{m+1} - n`,
/// equivalently `f_m + s (2 n_{m+1} - s)` with `s = n - N_m`.
///
/// `n = N_len` is accepted as well, since then `s = 0` and no information
/// about the following block is needed.
pub fn birkhoff_leading_term(code: &AlternationCode, n: u128) -> Result<u128> {
    let total = code.total_length();
    if n > total {
        return Err(Error::OutOfRange {
            what: "position",
            requested: n,
            available: total,
        });
    }
    if n == total {
        return Ok(code.f_at(code.len()));
    }
    let m = code.locate(n).expect("n < total");
    let s = n - code.n_at(m);
    let next = code.block(m + 1) as u128;
    Ok(code.f_at(m) + s * (2 * next - s))
}

/// Leading term of `-log2 mu(C_n(x))`: `f_m + s^2` for `N_m <= n < N_{m+1}`.
pub fn cylinder_leading_term(code: &AlternationCode, n: u128) -> Result<u128> {
    let total = code.total_length();
    if n > total {
        return Err(Error::OutOfRange {
            what: "position",
            requested: n,
            available: total,
        });
    }
    if n == total {
        return Ok(code.f_at(code.len()));
    }
    let m = code.locate(n).expect("n < total");
    let s = n - code.n_at(m);
    Ok(code.f_at(m) + s * s)
}

/// Block-form enclosure `[-A log 2, -A log 2 + 2 n log pi]` of `S_n psi`,
/// `A = n + f_{m+1} - r^2`.
///
/// Each of the `n` terms is bracketed by `[-2k log 2, -2k log 2 + 2 log pi]`
/// where `k` is the remaining run length, so the slack is `2 n log pi`.
pub fn birkhoff_block_form(code: &AlternationCode, n: u128) -> Result<LogBound> {
    if n == 0 {
        return Err(Error::domain("Birkhoff sums need n >= 1"));
    }
    let a = n + birkhoff_leading_term(code, n)?;
    Ok(affine_bound(a, n))
}

/// `[-A log 2, -A log 2 + 2 n log pi]`, rounded outward.
fn affine_bound(a: u128, n: u128) -> LogBound {
    let base = -(a as f64) * LN_2;
    let slack = 2.0 * n as f64 * LN_PI;
    LogBound {
        lo: down(base, 4),
        hi: up(base + slack, 4),
    }
}

/// Rigorous bounds on `log mu([w])`:
/// `-(n + 1 + sum n_i^2) log 2 <= log mu([w]) <= -(n + sum n_i^2) log 2 + 2 n log pi`
/// with `(n_i)` the alternation coding of `w`.
pub fn cylinder_log_bounds(w: &BinaryWord) -> Result<LogBound> {
    let code = alternation_encode(w)?;
    let n = w.len() as u128;
    let sq = code.f_at(code.len());
    let upper = affine_bound(n + sq, n).hi;
    let lower = down(-((n + 1 + sq) as f64) * LN_2, 4);
    Ok(LogBound { lo: lower, hi: upper })
}
