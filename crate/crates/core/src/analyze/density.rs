use super::xi::sample_grid;
use super::{limit_estimates, Normalization, SampleGrid, Trajectory};
use crate::construct::CylinderMeasure;
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::seqcore::{AlternationCode, SymbolSource};
use crate::spectrum::{joint_dim, SpectrumPoint};

/// `max ℓ_m` over the trailing `tail` fraction of `m in [1, m_max]`, an
/// empirical upper density of the positions covered by large blocks.
pub fn large_block_density(code: &AlternationCode, lambda: u64, m_max: usize, tail: f64) -> Result<f64> {
    let t = super::f_trajectory(code, m_max, lambda)?;
    Ok(limit_estimates(&t.ell, tail)?.limsup_hat)
}

/// Compares the large-block density against `1 - sup_S f` for a finite
/// sample `S` of spectrum points, with an absolute slack `tol`.
pub fn prop64_check(
    code: &AlternationCode,
    lambda: u64,
    targets: &[SpectrumPoint],
    m_max: usize,
    tail: f64,
    tol: f64,
) -> Result<CheckReport> {
    if targets.is_empty() {
        return Err(Error::domain("target set must not be empty"));
    }
    let sup = targets.iter().map(|&p| joint_dim(p)).fold(f64::NEG_INFINITY, f64::max);
    let t = super::f_trajectory(code, m_max, lambda)?;
    let est = limit_estimates(&t.ell, tail)?;
    let bound = 1.0 - sup;
    let deficit = (bound - est.limsup_hat).max(0.0);
    Ok(CheckReport::new("large_block_density", deficit <= tol, deficit)
        .with_window(est.window[0], est.window[1])
        .with_detail(format!("D_hat={:.6} bound={:.6} tol={tol}", est.limsup_hat, bound)))
}

/// `log nu(C_n(x)) / (-n log 2)` sampled on the grid up to `n_max`.
pub fn local_dimension_trace<M, S>(nu: &M, src: &S, n_max: usize, grid: SampleGrid) -> Result<Trajectory>
where
    M: CylinderMeasure + ?Sized,
    S: SymbolSource + ?Sized,
{
    if n_max == 0 {
        return Err(Error::domain("trace horizon must be positive"));
    }
    let empty = AlternationCode::from_blocks(Vec::new())?;
    let at: Vec<usize> = sample_grid(&empty, n_max as u128, grid)?.into_iter().map(|n| n as usize).collect();
    let prefix = src.window(0, n_max);
    let logs = nu.log_mass_trace(&prefix, &at)?;
    let pts = at
        .iter()
        .zip(logs)
        .map(|(&n, l)| (n as u128, l / (-(n as f64) * std::f64::consts::LN_2)))
        .collect();
    Ok(Trajectory::from_points(Normalization::LocalDimension, pts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{bounded_block_point, fiber_measure, BlockBernoulliMeasure, PredicatePositions};
    use crate::seqcore::{EventuallyPeriodic, FnSource};
    use std::sync::Arc;

    #[test]
    fn fiber_on_evens() {
        let nu = fiber_measure(Arc::new(PredicatePositions::new(|n| (n % 2 == 0).then_some(1))));
        let src = FnSource::new(|k| ((k % 2 == 0) || (k % 7 == 1)) as u8, true);
        let t = local_dimension_trace(&nu, &src, 100_000, SampleGrid::default()).unwrap();
        let e = limit_estimates(&t, 0.3).unwrap();
        assert!((e.liminf_hat - 0.5).abs() < 1e-3 && (e.limsup_hat - 0.5).abs() < 1e-3);
        let bad = EventuallyPeriodic::constant(0);
        assert!(local_dimension_trace(&nu, &bad, 10, SampleGrid::default()).is_err());
    }

    #[test]
    fn bernoulli_on_zeros() {
        let nu = BlockBernoulliMeasure::with_default_weight(8).unwrap();
        let t = local_dimension_trace(&nu, &EventuallyPeriodic::constant(0), 80_000, SampleGrid::default()).unwrap();
        let target = 3f64.ln() / (8.0 * std::f64::consts::LN_2);
        assert!((t.at(80_000).unwrap() - target).abs() < 1e-9);
    }

    #[test]
    fn bounded_point_has_no_large_blocks() {
        let p = bounded_block_point(5, 2).unwrap();
        let code = p.prefix_code(10_000).unwrap();
        assert_eq!(large_block_density(&code, 6, code.len(), 0.5).unwrap(), 0.0);
    }
}
