use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Normalization, Trajectory};
use crate::error::{Error, Result};
use crate::measure::{birkhoff_leading_term, cylinder_leading_term, LN_PI};
use crate::seqcore::{rational_f64, ratio_f64, AlternationCode};

/// Geometric grid `ceil(ratio^j)` together with every `n <= dense_up_to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleGrid {
    pub ratio: f64,
    pub dense_up_to: u128,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            ratio: 1.01,
            dense_up_to: 1000,
        }
    }
}

/// Sample positions in `[1, n_max]`: the grid, every block boundary `N_m`,
/// and the integer neighbours of both parabola vertices on each block,
/// `N_m (1 + F_m)` for the cylinder term and `N_m (1 - F_m)` for the
/// Birkhoff term. On each block the two sequences are monotone between
/// these points, so the extrema are sampled.
pub fn sample_grid(code: &AlternationCode, n_max: u128, grid: SampleGrid) -> Result<Vec<u128>> {
    if !(grid.ratio > 1.0) {
        return Err(Error::domain("grid ratio must exceed 1"));
    }
    let mut pts: Vec<u128> = (1..=grid.dense_up_to.min(n_max)).collect();
    let mut x = 1.0f64;
    loop {
        x *= grid.ratio;
        let n = x.ceil();
        if n > n_max as f64 {
            break;
        }
        pts.push(n as u128);
    }
    for m in 1..=code.len() {
        let nm = code.n_at(m);
        if nm > n_max {
            break;
        }
        let c = code.f_at(m) / nm;
        for p in [nm, nm + c, nm + c + 1, nm.saturating_sub(c), nm.saturating_sub(c + 1)] {
            if p >= 1 && p <= n_max {
                pts.push(p);
            }
        }
    }
    pts.push(n_max);
    pts.sort_unstable();
    pts.dedup();
    Ok(pts)
}

pub(crate) fn exact_over_square(num: u128, n: u128) -> f64 {
    match n.checked_mul(n) {
        Some(sq) => ratio_f64(num, sq),
        None => {
            let nn = BigInt::from(n);
            rational_f64(&BigRational::new(BigInt::from(num), &nn * &nn))
        }
    }
}

fn check_cover(code: &AlternationCode, n_max: u128) -> Result<()> {
    if n_max == 0 {
        return Err(Error::domain("trajectory horizon must be positive"));
    }
    if n_max > code.total_length() {
        return Err(Error::OutOfRange {
            what: "trajectory horizon",
            requested: n_max,
            available: code.total_length(),
        });
    }
    Ok(())
}

fn leading_trajectory(
    code: &AlternationCode,
    n_max: u128,
    grid: SampleGrid,
    normalization: Normalization,
    lead: fn(&AlternationCode, u128) -> Result<u128>,
) -> Result<Trajectory> {
    check_cover(code, n_max)?;
    let pts = sample_grid(code, n_max, grid)?;
    let mut out = Vec::with_capacity(pts.len());
    for n in pts {
        out.push((n, exact_over_square(lead(code, n)?, n)));
    }
    Ok(Trajectory::from_points(normalization, out))
}

/// `xi^mu_n = (f_m + (n - N_m)^2) / n^2` for `N_m <= n < N_{m+1}`.
pub fn xi_mu_trajectory(code: &AlternationCode, n_max: u128, grid: SampleGrid) -> Result<Trajectory> {
    leading_trajectory(code, n_max, grid, Normalization::XiMu, cylinder_leading_term)
}

/// `xi^psi_n = (f_m - (N_m - n)^2) / n^2` for `N_{m-1} <= n < N_m`.
pub fn xi_psi_trajectory(code: &AlternationCode, n_max: u128, grid: SampleGrid) -> Result<Trajectory> {
    leading_trajectory(code, n_max, grid, Normalization::XiPsi, birkhoff_leading_term)
}

/// One row of the figure data, in units of `log 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig2Row {
    pub n: u128,
    /// `f_m + s^2`, leading term of `-log2 mu(C_n)`.
    pub mu_lead: u128,
    pub mu_lo: f64,
    pub mu_hi: f64,
    /// `f_{m+1} - r^2`, leading term of `-S_n psi / log 2`.
    pub psi_lead: u128,
    pub psi_lo: f64,
    pub psi_hi: f64,
}

impl Fig2Row {
    pub const CSV_HEADER: &'static str = "n,mu_lead,mu_lo,mu_hi,psi_lead,psi_lo,psi_hi";
}

/// Exact leading terms and rigorous brackets for every `n` in `[lo, hi]`.
///
/// `-log2 mu(C_n) in [n + lead - 2n log2 pi, n + 1 + lead]` and
/// `-S_n psi / log 2 in [n + lead - 2n log2 pi, n + lead]`.
pub fn fig2_enclosures(code: &AlternationCode, lo: u128, hi: u128) -> Result<Vec<Fig2Row>> {
    if lo == 0 || lo > hi {
        return Err(Error::domain(format!("invalid range [{lo}, {hi}]")));
    }
    check_cover(code, hi)?;
    let log2_pi = LN_PI / std::f64::consts::LN_2;
    let mut rows = Vec::with_capacity((hi - lo + 1).min(1 << 20) as usize);
    for n in lo..=hi {
        let mu_lead = cylinder_leading_term(code, n)?;
        let psi_lead = birkhoff_leading_term(code, n)?;
        let slack = 2.0 * n as f64 * log2_pi;
        let base_mu = (n + mu_lead) as f64;
        let base_psi = (n + psi_lead) as f64;
        rows.push(Fig2Row {
            n,
            mu_lead,
            mu_lo: base_mu - slack,
            mu_hi: base_mu + 1.0,
            psi_lead,
            psi_lo: base_psi - slack,
            psi_hi: base_psi,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::limit_estimates;

    #[test]
    fn hand_values() {
        let code = AlternationCode::parse("2,2,1,1").unwrap();
        let rows = fig2_enclosures(&code, 1, 6).unwrap();
        let leads: Vec<(u128, u128)> = rows.iter().map(|r| (r.mu_lead, r.psi_lead)).collect();
        assert_eq!(leads, vec![(1, 3), (4, 4), (5, 7), (8, 8), (9, 9), (10, 10)]);
        for r in &rows {
            assert!(r.mu_lo <= r.mu_hi && r.psi_lo <= r.psi_hi);
        }
    }

    #[test]
    fn boundaries_agree() {
        let code = AlternationCode::parse("3,1,4,1,5,9,2,6").unwrap();
        let mu = xi_mu_trajectory(&code, code.total_length(), SampleGrid::default()).unwrap();
        let psi = xi_psi_trajectory(&code, code.total_length(), SampleGrid::default()).unwrap();
        for m in 1..=code.len() {
            let nm = code.n_at(m);
            let f = ratio_f64(code.f_at(m), nm * nm);
            assert_eq!(mu.at(nm), Some(f));
            assert_eq!(psi.at(nm), Some(f));
        }
    }

    #[test]
    fn all_ones() {
        let code = AlternationCode::from_blocks(vec![1; 50]).unwrap();
        let mu = xi_mu_trajectory(&code, 50, SampleGrid::default()).unwrap();
        for s in mu.samples() {
            assert_eq!(s.value, 1.0 / s.index as f64);
        }
    }

    #[test]
    fn geometric_extrema() {
        let code = AlternationCode::geometric(2, 40).unwrap();
        let n = code.total_length();
        let mu = limit_estimates(&xi_mu_trajectory(&code, n, SampleGrid::default()).unwrap(), 0.5).unwrap();
        let psi = limit_estimates(&xi_psi_trajectory(&code, n, SampleGrid::default()).unwrap(), 0.5).unwrap();
        assert!((mu.liminf_hat - 0.25).abs() < 1e-3 && (mu.limsup_hat - 1.0 / 3.0).abs() < 1e-3);
        assert!((psi.liminf_hat - 1.0 / 3.0).abs() < 1e-3 && (psi.limsup_hat - 0.5).abs() < 1e-3);
    }

    #[test]
    fn horizon_checks() {
        let code = AlternationCode::parse("2,2").unwrap();
        assert!(xi_mu_trajectory(&code, 5, SampleGrid::default()).is_err());
        assert!(fig2_enclosures(&code, 0, 3).is_err());
    }
}
