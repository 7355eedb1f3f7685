//! The joint spectrum `f(alpha, beta)` on the triangle
//! `0 <= alpha <= beta <= 1`, the companion `eta`, and the transforms that
//! map accumulation points of `F_m` to those of the normalized measure decay
//! and Birkhoff sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl SpectrumPoint {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 0.0 <= alpha && alpha <= beta && beta <= 1.0) {
            return Err(Error::domain(format!(
                "({alpha}, {beta}) is outside the triangle 0 <= alpha <= beta <= 1"
            )));
        }
        Ok(SpectrumPoint { alpha, beta })
    }

    pub fn is_corner(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    /// `sqrt(alpha beta + beta - alpha)`.
    fn s(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        (a * b + (b - a)).max(0.0).sqrt()
    }
}

/// `f = (s - beta) / (s + sqrt(alpha beta))` with `s = sqrt(alpha beta + beta - alpha)`,
/// and `f(0,0) = 1`.
///
/// Evaluated as `(beta - alpha)(1 - beta) / ((s + beta)(s + sqrt(alpha beta)))`,
/// which is the same expression after multiplying through by `s + beta` and
/// avoids the cancellation in `s - beta`.
pub fn joint_dim(p: SpectrumPoint) -> f64 {
    if p.is_corner() {
        return 1.0;
    }
    let (a, b) = (p.alpha, p.beta);
    let s = p.s();
    let g = (a * b).sqrt();
    ((b - a) * (1.0 - b) / ((s + b) * (s + g))).clamp(0.0, 1.0)
}

/// The defining expression, kept for cross-checks.
pub fn joint_dim_direct(p: SpectrumPoint) -> f64 {
    if p.is_corner() {
        return 1.0;
    }
    let s = p.s();
    (s - p.beta) / (s + (p.alpha * p.beta).sqrt())
}

/// `eta = (sqrt(beta) + sqrt(alpha)) / (s + sqrt(alpha beta))`.
pub fn eta(p: SpectrumPoint) -> Result<f64> {
    if p.is_corner() {
        return Err(Error::domain("eta is undefined at (0,0)"));
    }
    let (a, b) = (p.alpha, p.beta);
    Ok((b.sqrt() + a.sqrt()) / (p.s() + (a * b).sqrt()))
}

/// `eta = (1 - f) / sqrt(beta)`.
pub fn eta_from_f(p: SpectrumPoint) -> Result<f64> {
    if p.is_corner() {
        return Err(Error::domain("eta is undefined at (0,0)"));
    }
    Ok((1.0 - joint_dim(p)) / p.beta.sqrt())
}

/// Accumulation points of `-log mu(C_n)/(n^2 log 2)` and
/// `-S_n psi/(n^2 log 2)` for a point with `liminf F = alpha`, `limsup F = beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccumulationPoints {
    pub liminf_xi_mu: f64,
    pub limsup_xi_mu: f64,
    pub liminf_xi_psi: f64,
    /// `+inf` when `beta = 1`.
    pub limsup_xi_psi: f64,
}

pub fn accumulation_transform(p: SpectrumPoint) -> AccumulationPoints {
    let (a, b) = (p.alpha, p.beta);
    AccumulationPoints {
        liminf_xi_mu: a / (1.0 + a),
        limsup_xi_mu: b,
        liminf_xi_psi: a,
        limsup_xi_psi: if b == 1.0 { f64::INFINITY } else { b / (1.0 - b) },
    }
}

/// `phi_r(c) = (r + c^2) / (1 + c)^2`, minimal at `c = r`.
pub fn phi(r: f64, c: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) || !(c >= 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("phi needs r > 0 and c >= 0, got r={r}, c={c}")));
    }
    Ok((r + c * c) / ((1.0 + c) * (1.0 + c)))
}

/// `phi_bar_r(c) = (r - c^2) / (1 - c)^2`, maximal at `c = r`.
pub fn phi_bar(r: f64, c: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) || !(0.0..1.0).contains(&c) {
        return Err(Error::domain(format!(
            "phi_bar needs 0 < r < 1 and 0 <= c < 1, got r={r}, c={c}"
        )));
    }
    Ok((r - c * c) / ((1.0 - c) * (1.0 - c)))
}

pub const BETA_STAR_TOL: f64 = 1e-10;

/// Maximizer of `beta -> f(alpha, beta)` on `(alpha, 1)` by golden-section
/// search, followed by a local unimodality check around the result.
pub fn beta_star(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("beta_star needs 0 < alpha < 1, got {alpha}")));
    }
    let f = |b: f64| joint_dim(SpectrumPoint { alpha, beta: b });
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (alpha, 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iters = 0;
    while hi - lo > BETA_STAR_TOL {
        iters += 1;
        if iters > 500 {
            return Err(Error::Numeric(format!("golden section did not converge for alpha={alpha}")));
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let b = 0.5 * (lo + hi);
    if !(alpha < b && b < 1.0) {
        return Err(Error::Numeric(format!("maximizer {b} left ({alpha}, 1)")));
    }
    // monotone on either side within a small window
    let h = ((b - alpha).min(1.0 - b) / 8.0).min(1e-3);
    let fb = f(b);
    let left_ok = f(b - 2.0 * h) < f(b - h) && f(b - h) <= fb;
    let right_ok = fb >= f(b + h) && f(b + h) > f(b + 2.0 * h);
    if !(left_ok && right_ok) {
        return Err(Error::Numeric(format!("no strict local maximum detected at beta={b}")));
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub alpha: f64,
    pub beta: f64,
    pub f: f64,
    pub eta: Option<f64>,
}

/// Lower-triangular grid `alpha_i = i/(q-1) <= beta_j = j/(q-1)`, ordered by
/// `alpha` then `beta`; `q(q+1)/2` rows.
pub fn spectrum_grid(q: usize) -> Result<Vec<GridRow>> {
    if q < 2 {
        return Err(Error::domain("grid resolution must be at least 2"));
    }
    let step = (q - 1) as f64;
    let cells: Vec<(usize, usize)> = (0..q).flat_map(|i| (i..q).map(move |j| (i, j))).collect();
    Ok(cells
        .par_iter()
        .map(|&(i, j)| {
            let p = SpectrumPoint {
                alpha: i as f64 / step,
                beta: j as f64 / step,
            };
            GridRow {
                alpha: p.alpha,
                beta: p.beta,
                f: joint_dim(p),
                eta: eta(p).ok(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(a: f64, b: f64) -> SpectrumPoint {
        SpectrumPoint::new(a, b).unwrap()
    }

    #[test]
    fn boundary_values() {
        assert!((joint_dim(pt(0.0, 0.25)) - 0.5).abs() < 1e-15);
        assert_eq!(joint_dim(pt(0.3, 0.3)), 0.0);
        assert_eq!(joint_dim(pt(0.4, 1.0)), 0.0);
        assert_eq!(joint_dim(pt(0.0, 0.0)), 1.0);
        assert!(SpectrumPoint::new(0.5, 0.4).is_err());
        assert!(SpectrumPoint::new(-0.1, 0.4).is_err());
        assert!(SpectrumPoint::new(0.1, 1.1).is_err());
    }

    #[test]
    fn interior_value() {
        let p = pt(0.25, 0.5);
        assert!((joint_dim(p) - 0.11634).abs() < 1e-5);
        assert!((joint_dim(p) - joint_dim_direct(p)).abs() < 1e-15);
    }

    #[test]
    fn eta_values() {
        for b in [0.01, 0.3, 1.0] {
            assert!((eta(pt(0.0, b)).unwrap() - 1.0).abs() < 1e-12);
            assert!((eta(pt(b, b)).unwrap() - 1.0 / b.sqrt()).abs() < 1e-12);
        }
        let p = pt(0.25, 0.5);
        let expected = (1.0 - 0.116_336_506_010_519_79) / 0.5f64.sqrt();
        assert!((eta(p).unwrap() - expected).abs() < 1e-12);
        assert!((eta(p).unwrap() - 1.2497).abs() < 1e-4);
        assert!(eta(pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn accumulation_examples() {
        let a = accumulation_transform(pt(1.0 / 3.0, 1.0 / 3.0));
        assert!((a.liminf_xi_mu - 0.25).abs() < 1e-15);
        assert!((a.limsup_xi_mu - 1.0 / 3.0).abs() < 1e-15);
        assert!((a.liminf_xi_psi - 1.0 / 3.0).abs() < 1e-15);
        assert!((a.limsup_xi_psi - 0.5).abs() < 1e-15);
        let z = accumulation_transform(pt(0.0, 0.0));
        assert_eq!((z.liminf_xi_mu, z.limsup_xi_mu, z.liminf_xi_psi, z.limsup_xi_psi), (0.0, 0.0, 0.0, 0.0));
        let e = accumulation_transform(pt(0.0, 1.0));
        assert_eq!(e.limsup_xi_psi, f64::INFINITY);
        assert_eq!(e.limsup_xi_mu, 1.0);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(phi(0.3, 0.0).unwrap(), 0.3);
        assert!((phi_bar(1.0 / 3.0, 1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(phi(0.0, 1.0).is_err());
        assert!(phi_bar(0.5, 1.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let r: f64 = rng.gen_range(0.01..0.99);
            let c: f64 = rng.gen_range(0.0..0.99);
            assert!(phi(r, c).unwrap() >= r / (1.0 + r) - 1e-15);
            assert!(phi_bar(r, c).unwrap() <= r / (1.0 - r) + 1e-12);
        }
    }

    #[test]
    fn beta_star_is_a_maximizer() {
        let mut prev: Option<f64> = None;
        for i in 1..200 {
            let a = i as f64 / 200.0;
            let b = beta_star(a).unwrap();
            assert!(a < b && b < 1.0);
            let fb = joint_dim(pt(a, b));
            for j in 0..1000 {
                let beta = a + (1.0 - a) * j as f64 / 999.0;
                assert!(fb >= joint_dim(pt(a, beta)) - 1e-14);
            }
            if let Some(p) = prev {
                assert!((b - p).abs() < 0.05, "jump at alpha={a}");
            }
            prev = Some(b);
        }
        assert!(beta_star(0.0).is_err());
        assert!(beta_star(1.0).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = spectrum_grid(101).unwrap();
        assert_eq!(g.len(), 5151);
        let row = g.iter().find(|r| r.alpha == 0.0 && r.beta == 1.0).unwrap();
        assert_eq!(row.f, 0.0);
        let row = g.iter().find(|r| r.alpha == 0.0 && r.beta == 0.25).unwrap();
        assert!((row.f - 0.5).abs() < 1e-15);
        assert!(g.iter().all(|r| (0.0..=1.0).contains(&r.f)));
        assert!(g[0].eta.is_none());
        assert!(spectrum_grid(1).is_err());
    }

    #[test]
    fn sampled_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let b: f64 = rng.gen_range(0.0..=1.0);
            assert!((joint_dim(pt(0.0, b)) - (1.0 - b.sqrt())).abs() < 1e-12);
            assert!(joint_dim(pt(b, b)).abs() < 1e-12);
            let a: f64 = rng.gen_range(0.0..=1.0);
            assert!(joint_dim(pt(a, 1.0)).abs() < 1e-12);
        }
        for _ in 0..10_000 {
            let b: f64 = rng.gen_range(1e-3..1.0);
            let a: f64 = rng.gen_range(0.0..b);
            if a < b && b < 1.0 {
                assert!(joint_dim(pt(a, b)) > 0.0, "({a}, {b})");
                let p = pt(a, b);
                assert!((eta(p).unwrap() - eta_from_f(p).unwrap()).abs() < 1e-12 * eta(p).unwrap().max(1.0));
            }
        }
    }
}
