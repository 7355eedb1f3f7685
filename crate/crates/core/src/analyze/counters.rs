use super::xi::exact_over_square;
use super::{Normalization, Trajectory};
use crate::error::{Error, Result};
use crate::seqcore::{ratio_f64, rho_from_sums, AlternationCode};

/// `F_m`, `F^Λ_m`, `ℓ_m` and `ϱ_m` for `m = 1..=m_max`. `ϱ_m` is only
/// sampled once some block reaches the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterTrajectories {
    pub f: Trajectory,
    pub f_lambda: Trajectory,
    pub ell: Trajectory,
    pub rho: Trajectory,
}

pub fn f_trajectory(code: &AlternationCode, m_max: usize, lambda: u64) -> Result<CounterTrajectories> {
    if m_max > code.len() {
        return Err(Error::OutOfRange {
            what: "block index",
            requested: m_max as u128,
            available: code.len() as u128,
        });
    }
    if lambda == 0 {
        return Err(Error::domain("filter threshold must be at least 1"));
    }
    let mut f = Vec::with_capacity(m_max);
    let mut fl = Vec::with_capacity(m_max);
    let mut ell = Vec::with_capacity(m_max);
    let mut rho = Vec::new();
    let (mut s, mut q) = (0u128, 0u128);
    for m in 1..=m_max {
        let b = code.block(m) as u128;
        if b >= lambda as u128 {
            s += b;
            q += b * b;
        }
        let n = code.n_at(m);
        let idx = m as u128;
        f.push((idx, exact_over_square(code.f_at(m), n)));
        fl.push((idx, exact_over_square(q, n)));
        ell.push((idx, ratio_f64(s, n)));
        if let Some(r) = rho_from_sums(s, q) {
            rho.push((idx, r));
        }
    }
    Ok(CounterTrajectories {
        f: Trajectory::from_points(Normalization::F, f),
        f_lambda: Trajectory::from_points(Normalization::FLambda { lambda }, fl),
        ell: Trajectory::from_points(Normalization::Ell { lambda }, ell),
        rho: Trajectory::from_points(Normalization::Rho { lambda }, rho),
    })
}

/// `F^Λ` at an arbitrary position `n`, where the block in progress counts
/// with its partial length `s` once the whole block reaches the threshold.
pub fn interpolated_f_lambda(code: &AlternationCode, lambda: u64, n: u128) -> Result<f64> {
    if n == 0 || n > code.total_length() {
        return Err(Error::OutOfRange {
            what: "position",
            requested: n,
            available: code.total_length(),
        });
    }
    let m = code.locate(n).unwrap_or(code.len());
    let mut q: u128 = code.blocks()[..m]
        .iter()
        .filter(|&&b| b >= lambda)
        .map(|&b| (b as u128) * (b as u128))
        .sum();
    if m < code.len() && code.block(m + 1) >= lambda {
        let s = n - code.n_at(m);
        q += s * s;
    }
    Ok(exact_over_square(q, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::bounded_block_point;

    #[test]
    fn geometric_tends_to_one_third() {
        let code = AlternationCode::geometric(2, 60).unwrap();
        let t = f_trajectory(&code, 60, 1).unwrap();
        assert!((t.f.at(60).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // filter at 1 keeps every block
        assert_eq!(t.f.samples(), t.f_lambda.samples());
        for s in t.ell.samples() {
            assert_eq!(s.value, 1.0);
        }
    }

    #[test]
    fn ell_equals_rho_sqrt_f_lambda() {
        let code = AlternationCode::geometric(2, 40).unwrap();
        let t = f_trajectory(&code, 40, 8).unwrap();
        for r in t.rho.samples() {
            let fl = t.f_lambda.at(r.index).unwrap();
            let ell = t.ell.at(r.index).unwrap();
            assert!((ell - r.value * fl.sqrt()).abs() < 1e-14);
        }
        assert_eq!(t.rho.samples()[0].index, 3);
    }

    #[test]
    fn bounded_blocks_filter_to_zero() {
        let p = bounded_block_point(6, 9).unwrap();
        let code = p.prefix_code(20_000).unwrap();
        let t = f_trajectory(&code, code.len(), 7).unwrap();
        assert!(t.f_lambda.values().all(|v| v == 0.0));
        assert!(t.rho.is_empty());
    }

    #[test]
    fn interpolation_hits_block_values() {
        let code = AlternationCode::parse("1,5,2,9,3").unwrap();
        let t = f_trajectory(&code, 5, 4).unwrap();
        for m in 1..=5 {
            let v = interpolated_f_lambda(&code, 4, code.n_at(m)).unwrap();
            assert_eq!(v, t.f_lambda.at(m as u128).unwrap());
        }
        // halfway through the 9-block
        let v = interpolated_f_lambda(&code, 4, 12).unwrap();
        assert_eq!(v, (25.0 + 16.0) / 144.0);
    }
}
