//! `ϱ_k` against its predecessor across every block.
//!
//! With `γ = F^Λ_{k-1}`, `δ = F^Λ_k` and `p_k = sqrt(γ/δ) N_{k-1}/N_k`,
//! a large block with `γ < δ` gives
//! `ϱ_k = p_k ϱ_{k-1} + (1 - p_k) η(γ, δ)`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::seqcore::{ratio_f64, rho_from_sums, AlternationCode};
use crate::spectrum::{eta, SpectrumPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoCase {
    /// `n_k < Λ`: nothing changes.
    Small,
    /// `n_k >= Λ` and `γ >= δ`: `ϱ` strictly increases.
    LargeNotIncreasing,
    /// `n_k >= Λ` and `γ < δ`: the convex-combination identity.
    Convex,
}

struct Step {
    n_prev: u128,
    n_k: u128,
    block: u128,
    s_prev: u128,
    q_prev: u128,
}

impl Step {
    fn at(code: &AlternationCode, k: usize, s_prev: u128, q_prev: u128) -> Step {
        Step {
            n_prev: code.n_at(k - 1),
            n_k: code.n_at(k),
            block: code.block(k) as u128,
            s_prev,
            q_prev,
        }
    }

    fn large(&self, lambda: u64) -> bool {
        self.block >= lambda as u128
    }

    fn q_k(&self) -> u128 {
        self.q_prev + self.block * self.block
    }

    fn s_k(&self) -> u128 {
        self.s_prev + self.block
    }

    /// `γ >= δ`, decided exactly: `Q_{k-1} N_k^2 >= Q_k N_{k-1}^2`.
    fn not_increasing(&self) -> bool {
        let lhs = BigUint::from(self.q_prev) * BigUint::from(self.n_k) * BigUint::from(self.n_k);
        let rhs = BigUint::from(self.q_k()) * BigUint::from(self.n_prev) * BigUint::from(self.n_prev);
        lhs >= rhs
    }

    /// `ϱ_k > ϱ_{k-1}`, decided exactly: `S_k^2 Q_{k-1} > S_{k-1}^2 Q_k`.
    fn rho_increases(&self) -> bool {
        let s_k = BigUint::from(self.s_k());
        let s_p = BigUint::from(self.s_prev);
        &s_k * &s_k * BigUint::from(self.q_prev) > &s_p * &s_p * BigUint::from(self.q_k())
    }

    fn rho_prev(&self) -> f64 {
        self.s_prev as f64 / (self.q_prev as f64).sqrt()
    }

    fn rho_k(&self) -> f64 {
        self.s_k() as f64 / (self.q_k() as f64).sqrt()
    }

    /// `|ϱ_k - (p ϱ_{k-1} + (1 - p) η(γ, δ))|`.
    fn convex_residual(&self) -> Result<f64> {
        let gamma = ratio_f64(self.q_prev, self.n_prev * self.n_prev);
        let delta = ratio_f64(self.q_k(), self.n_k * self.n_k);
        let p = (ratio_f64(self.q_prev, self.q_k())).sqrt();
        let e = eta(SpectrumPoint::new(gamma, delta)?)?;
        let rhs = p * self.rho_prev() + (1.0 - p) * e;
        Ok((self.rho_k() - rhs).abs())
    }
}

fn prefix_large_sums(code: &AlternationCode, lambda: u64, upto: usize) -> (u128, u128) {
    code.blocks()[..upto]
        .iter()
        .filter(|&&b| b >= lambda)
        .fold((0, 0), |(s, q), &b| (s + b as u128, q + (b as u128) * (b as u128)))
}

/// Lemma check at block `k`; skipped unless `n_k >= Λ` and
/// `0 < F^Λ_{k-1} < F^Λ_k`.
pub fn convexity_identity_check(code: &AlternationCode, lambda: u64, k: usize) -> Result<CheckReport> {
    if k < 2 || k > code.len() {
        return Err(Error::OutOfRange {
            what: "block index",
            requested: k as u128,
            available: code.len() as u128,
        });
    }
    if lambda == 0 {
        return Err(Error::domain("filter threshold must be at least 1"));
    }
    let name = format!("convexity_identity k={k}");
    let (s, q) = prefix_large_sums(code, lambda, k - 1);
    let step = Step::at(code, k, s, q);
    if !step.large(lambda) {
        return Ok(CheckReport::skip(name, "block below threshold"));
    }
    if q == 0 {
        return Ok(CheckReport::skip(name, "no earlier large block"));
    }
    if step.not_increasing() {
        return Ok(CheckReport::skip(name, "filtered ratio does not increase"));
    }
    let r = step.convex_residual()?;
    Ok(CheckReport::within(name, r, 1e-10).with_window(k as u128 - 1, k as u128))
}

/// Per-case tallies over every block of a code.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexitySweep {
    pub small: usize,
    pub not_increasing: usize,
    pub convex: usize,
    /// Large blocks before which no large block occurred.
    pub undefined: usize,
    pub max_residual: f64,
    /// Blocks where the case prediction failed.
    pub violations: Vec<(usize, RhoCase)>,
}

impl ConvexitySweep {
    pub fn merge(&mut self, other: &ConvexitySweep) {
        self.small += other.small;
        self.not_increasing += other.not_increasing;
        self.convex += other.convex;
        self.undefined += other.undefined;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.violations.extend_from_slice(&other.violations);
    }
}

pub fn convexity_sweep(code: &AlternationCode, lambda: u64) -> Result<ConvexitySweep> {
    if lambda == 0 {
        return Err(Error::domain("filter threshold must be at least 1"));
    }
    let mut out = ConvexitySweep::default();
    let (mut s, mut q) = (0u128, 0u128);
    if let Some(&b) = code.blocks().first() {
        if b >= lambda {
            s = b as u128;
            q = s * s;
        }
    }
    for k in 2..=code.len() {
        let step = Step::at(code, k, s, q);
        if !step.large(lambda) {
            out.small += 1;
            // the filtered sums are untouched, so the ratio is reproduced exactly
            let after = rho_from_sums(s, q);
            if after != rho_from_sums(step.s_prev, step.q_prev) {
                out.violations.push((k, RhoCase::Small));
            }
        } else if q == 0 {
            out.undefined += 1;
        } else if step.not_increasing() {
            out.not_increasing += 1;
            if !step.rho_increases() {
                out.violations.push((k, RhoCase::LargeNotIncreasing));
            }
        } else {
            out.convex += 1;
            let r = step.convex_residual()?;
            out.max_residual = out.max_residual.max(r);
            if !(r <= 1e-10) {
                out.violations.push((k, RhoCase::Convex));
            }
        }
        if step.large(lambda) {
            s = step.s_k();
            q = step.q_k();
        }
    }
    Ok(out)
}
