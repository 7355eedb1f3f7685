//! The verification suite: each numbered criterion is a group of checks at
//! pinned tolerances, grouped into suites by module.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analyze::{
    convexity_sweep, f_trajectory, limit_estimates, xi_mu_trajectory, xi_psi_trajectory, ConvexitySweep,
    SampleGrid,
};
use crate::construct::{
    fiber_dimension_bound, idealized_block_simulation, intermediate_scaling_point, joint_parameters,
    joint_spectrum_point, ConstructedPoint,
};
use crate::error::{Error, Result};
use crate::measure::{
    birkhoff_block_form, birkhoff_sum, cylinder_log_bounds, cylinder_measure_estimate, riesz_quadrature,
    EstimateConfig, QuadratureConfig, DEFAULT_LOOKAHEAD, LN_PI,
};
use crate::report::CheckReport;
use crate::seqcore::{AlternationCode, BinaryWord, EventuallyPeriodic};
use crate::spectrum::{eta, eta_from_f, joint_dim, SpectrumPoint};

/// Seed of every randomized check.
pub const SEED: u64 = 20_240_611;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Measure,
    Spectrum,
    Construct,
    Analyze,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        Ok(match s {
            "all" => Suite::All,
            "measure" => Suite::Measure,
            "spectrum" => Suite::Spectrum,
            "construct" => Suite::Construct,
            "analyze" => Suite::Analyze,
            _ => return Err(Error::Parse(format!("unknown suite '{s}'"))),
        })
    }

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
            Suite::Measure => &[1, 2, 3, 10],
            Suite::Spectrum => &[4],
            Suite::Construct => &[5, 7, 8],
            Suite::Analyze => &[6, 9],
        }
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &c in suite.criteria() {
        out.extend(criterion(c)?);
    }
    Ok(out)
}

pub fn criterion(c: u8) -> Result<Vec<CheckReport>> {
    let checks = match c {
        1 => sandwich()?,
        2 => estimator_identities()?,
        3 => quadrature_cross_check()?,
        4 => spectrum_identities()?,
        5 => idealized_cycles()?,
        6 => geometric_point()?,
        7 => joint_point()?,
        8 => intermediate_point()?,
        9 => convexity()?,
        10 => dyadic_gap()?,
        _ => return Err(Error::domain(format!("no criterion {c}"))),
    };
    Ok(checks
        .into_iter()
        .map(|mut r| {
            r.check = format!("c{c}.{}", r.check);
            r
        })
        .collect())
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> BinaryWord {
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

/// Fraction of words whose estimate misses the strict interior, and the
/// smallest margin to either endpoint seen.
fn sandwich_over(words: &[BinaryWord], depth: usize) -> Result<(usize, f64)> {
    let cfg = EstimateConfig::new(depth);
    let res: Vec<Result<(bool, f64)>> = words
        .par_iter()
        .map(|w| {
            let e = cylinder_measure_estimate(w, &cfg)?;
            let margin = e
                .per_anchor
                .iter()
                .chain(std::iter::once(&e.log_value))
                .map(|&v| (v - e.bounds.lo).min(e.bounds.hi - v))
                .fold(f64::INFINITY, f64::min);
            Ok((e.inside_sandwich, margin))
        })
        .collect();
    let mut misses = 0;
    let mut margin = f64::INFINITY;
    for r in res {
        let (inside, m) = r?;
        misses += (!inside) as usize;
        margin = margin.min(m);
    }
    Ok((misses, margin))
}

fn sandwich() -> Result<Vec<CheckReport>> {
    let all8: Vec<BinaryWord> = BinaryWord::all_of_length(8).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let rand12: Vec<BinaryWord> = (0..256).map(|_| random_word(&mut rng, 12)).collect();
    let mut out = Vec::new();
    for (name, words, depth) in [("all_length_8", &all8, 12), ("random_length_12", &rand12, 14)] {
        let (misses, margin) = sandwich_over(words, depth)?;
        out.push(
            CheckReport::new(format!("sandwich_{name}"), misses == 0, misses as f64)
                .with_detail(format!("{} words at depth {depth}, smallest margin {margin:.4}", words.len())),
        );
    }
    Ok(out)
}

fn estimator_identities() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let e = cylinder_measure_estimate(&BinaryWord::parse("0")?, &EstimateConfig::new(20))?;
    out.push(CheckReport::within("first_cylinder_half", (e.value() - 0.5).abs(), 1e-3));
    out.push(CheckReport::within("first_cylinder_spread", e.anchor_spread, 1e-3));

    let anchor = EventuallyPeriodic::one_third();
    let single = |depth: usize| EstimateConfig::new(depth).with_anchors(vec![Arc::new(anchor.clone())]);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let words: Vec<BinaryWord> = (0..100)
        .map(|_| {
            let len = rng.gen_range(1..=10);
            random_word(&mut rng, len)
        })
        .collect();
    let k = 10;
    let add: Vec<Result<f64>> = words
        .par_iter()
        .map(|w| {
            let e0 = cylinder_measure_estimate(&w.extended(0), &single(k))?.value();
            let e1 = cylinder_measure_estimate(&w.extended(1), &single(k))?.value();
            let e = cylinder_measure_estimate(w, &single(k + 1))?.value();
            Ok(((e0 + e1) - e).abs() / e)
        })
        .collect();
    let worst = add.into_iter().try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))?;
    out.push(CheckReport::within("additivity_relative", worst, 1e-12));

    let flips: Vec<Result<f64>> = words
        .par_iter()
        .map(|w| {
            let cfg = EstimateConfig::new(k);
            let a = cylinder_measure_estimate(w, &cfg)?.value();
            let b = cylinder_measure_estimate(&w.flipped(), &cfg)?.value();
            Ok((a - b).abs() / a)
        })
        .collect();
    let worst = flips.into_iter().try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))?;
    out.push(CheckReport::within("flip_symmetry_relative", worst, 1e-12));
    Ok(out)
}

fn quadrature_cross_check() -> Result<Vec<CheckReport>> {
    let levels = 14;
    let qcfg = QuadratureConfig::recommended(levels);
    let total = riesz_quadrature(&BinaryWord::empty(), &qcfg)?;
    let mut out = vec![CheckReport::within("quadrature_total_mass", (total - 1.0).abs(), 1e-8)];
    let words: Vec<BinaryWord> = (1..=4).flat_map(BinaryWord::all_of_length).collect();
    let ecfg = EstimateConfig::new(14);
    let diffs: Vec<Result<f64>> = words
        .par_iter()
        .map(|w| {
            let q = riesz_quadrature(w, &qcfg)?;
            let e = cylinder_measure_estimate(w, &ecfg)?.value();
            Ok((q - e).abs())
        })
        .collect();
    let worst = diffs.into_iter().try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))?;
    out.push(
        CheckReport::within("estimator_vs_quadrature", worst, 5e-3)
            .with_detail(format!("{} words of length 1..=4, quadrature levels {levels}", words.len())),
    );
    Ok(out)
}

fn spectrum_identities() -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let b: f64 = rng.gen_range(0.0..=1.0);
        worst = worst.max((joint_dim(SpectrumPoint::new(0.0, b)?) - (1.0 - b.sqrt())).abs());
        worst = worst.max(joint_dim(SpectrumPoint::new(b, b)?).abs());
        worst = worst.max(joint_dim(SpectrumPoint::new(b, 1.0)?).abs());
    }
    let mut out = vec![CheckReport::within("boundary_identities", worst, 1e-12)];

    let q = 200;
    let grid = |i: usize| i as f64 / (q - 1) as f64;
    let mut mono_fail = 0usize;
    let mut uni_fail = 0usize;
    let mut eta_worst = 0.0f64;
    for j in 0..q {
        let b = grid(j);
        let mut prev = f64::INFINITY;
        for i in 0..=j {
            let v = joint_dim(SpectrumPoint::new(grid(i), b)?);
            if v > prev + 1e-15 {
                mono_fail += 1;
            }
            prev = v;
        }
    }
    for i in 0..q {
        let a = grid(i);
        let vals: Vec<f64> = (i..q).map(|j| joint_dim(SpectrumPoint::new(a, grid(j)).unwrap())).collect();
        // once the values start falling they never rise again
        let mut falling = false;
        for w in vals.windows(2) {
            if w[1] < w[0] - 1e-15 {
                falling = true;
            } else if falling && w[1] > w[0] + 1e-15 {
                uni_fail += 1;
            }
        }
        for j in i..q {
            let p = SpectrumPoint::new(a, grid(j))?;
            if p.alpha == 0.0 && p.beta == 0.0 {
                continue;
            }
            let (x, y) = (eta(p)?, eta_from_f(p)?);
            eta_worst = eta_worst.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    out.push(CheckReport::new("monotone_in_alpha", mono_fail == 0, mono_fail as f64));
    out.push(CheckReport::new("unimodal_in_beta", uni_fail == 0, uni_fail as f64));
    out.push(CheckReport::within("eta_two_formulas", eta_worst, 1e-12));
    Ok(out)
}

fn idealized_cycles() -> Result<Vec<CheckReport>> {
    let mut ratio_worst = 0.0f64;
    let mut eq_worst = 0.0f64;
    for i in 1..=20 {
        for j in 1..=20 {
            let (a, b) = (i as f64 / 21.0, j as f64 / 21.0);
            if a >= b {
                continue;
            }
            let f = joint_dim(SpectrumPoint::new(a, b)?);
            for c in idealized_block_simulation(a, b, 20)? {
                ratio_worst = ratio_worst.max((c.ratio - f).abs());
            }
            let p = joint_parameters(a, b)?;
            let g = 1.0 + p.ell + p.m;
            eq_worst = eq_worst.max((p.m * p.m + b - b * g * g).abs());
        }
    }
    Ok(vec![
        CheckReport::within("cycle_ratio_equals_f", ratio_worst, 1e-12),
        CheckReport::within("block_equation", eq_worst, 1e-10),
    ])
}

fn geometric_point() -> Result<Vec<CheckReport>> {
    let code = AlternationCode::geometric(2, 40)?;
    let n = code.total_length();
    let grid = SampleGrid::default();
    let mu = limit_estimates(&xi_mu_trajectory(&code, n, grid)?, 0.5)?;
    let psi = limit_estimates(&xi_psi_trajectory(&code, n, grid)?, 0.5)?;
    let d_mu = (mu.liminf_hat - 0.25).abs().max((mu.limsup_hat - 1.0 / 3.0).abs());
    let d_psi = (psi.liminf_hat - 1.0 / 3.0).abs().max((psi.limsup_hat - 0.5).abs());
    Ok(vec![
        CheckReport::within("xi_mu_tail_extrema", d_mu, 1e-3)
            .with_window(mu.window[0], mu.window[1])
            .with_detail(format!("({:.6}, {:.6})", mu.liminf_hat, mu.limsup_hat)),
        CheckReport::within("xi_psi_tail_extrema", d_psi, 1e-3)
            .with_window(psi.window[0], psi.window[1])
            .with_detail(format!("({:.6}, {:.6})", psi.liminf_hat, psi.limsup_hat)),
    ])
}

/// The code of a point long enough to hold `m` complete blocks.
pub fn code_with_blocks(p: &ConstructedPoint, m: usize) -> Result<AlternationCode> {
    let mut len = 1usize << 12;
    loop {
        let c = p.prefix_code(len)?;
        if c.len() >= m {
            return Ok(c.truncated(m));
        }
        len = len.checked_mul(2).ok_or(Error::Overflow("prefix length"))?;
        if len > 1 << 34 {
            return Err(Error::Infeasible(format!("more than 2^34 symbols needed for {m} blocks")));
        }
    }
}

fn joint_point() -> Result<Vec<CheckReport>> {
    let (alpha, beta, lambda) = (0.25, 0.5, 64u64);
    let m_max = 10_000;
    // the window has to hold a whole cycle; block counts grow roughly by
    // the factor 1 + l + m per cycle
    let tail = 0.9;
    let p = joint_spectrum_point(alpha, beta, lambda, SEED)?;
    let code = code_with_blocks(&p, m_max)?;
    let sp = SpectrumPoint::new(alpha, beta)?;
    let f = joint_dim(sp);
    let t = f_trajectory(&code, m_max, lambda)?;
    let fe = limit_estimates(&t.f, tail)?;
    let d_f = (fe.liminf_hat - alpha).abs().max((fe.limsup_hat - beta).abs());
    let mut out = vec![CheckReport::within("F_tail_extrema", d_f, 0.02)
        .with_window(fe.window[0], fe.window[1])
        .with_detail(format!("({:.6}, {:.6})", fe.liminf_hat, fe.limsup_hat))];

    let horizon = code.total_length() as u64;
    let density = 1.0 - fiber_dimension_bound(&p, horizon, tail)?;
    let target = 1.0 - f + 2.0 / lambda as f64;
    out.push(
        CheckReport::within("determined_density", (density - target).abs(), 0.02)
            .with_window(((1.0 - tail) * horizon as f64).ceil() as u128, horizon as u128)
            .with_detail(format!("density {density:.6}, target {target:.6}")),
    );

    let rho = limit_estimates(&t.rho, tail)?;
    let e = eta(sp)?;
    let deficit = (e - 0.05 - rho.liminf_hat).max(0.0);
    out.push(
        CheckReport::new("rho_tail_min", deficit == 0.0, deficit)
            .with_window(rho.window[0], rho.window[1])
            .with_detail(format!("min {:.6}, eta {e:.6}", rho.liminf_hat)),
    );

    let ell = limit_estimates(&t.ell, tail)?;
    let deficit = (1.0 - f - 0.02 - ell.limsup_hat).max(0.0);
    out.push(
        CheckReport::new("large_block_density", deficit == 0.0, deficit)
            .with_window(ell.window[0], ell.window[1])
            .with_detail(format!("D_hat {:.6}, 1 - f {:.6}", ell.limsup_hat, 1.0 - f)),
    );
    Ok(out)
}

/// Maxima of `value(m)` over the blocks ending in each decade `[10^d, 10^{d+1})`.
fn decade_maxima(code: &AlternationCode, from: u32, to: u128, value: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut lo = 10u128.pow(from);
    while lo < to {
        let hi = (lo * 10).min(to);
        let mut best = f64::NEG_INFINITY;
        for m in 1..=code.len() {
            let n = code.n_at(m);
            if n >= lo && n < hi {
                best = best.max(value(m));
            }
        }
        out.push(best);
        lo *= 10;
    }
    out
}

fn intermediate_point() -> Result<Vec<CheckReport>> {
    let (gamma, alpha, lambda) = (1.5, 1.0, 16u64);
    let (n_lo, n_hi) = (1_000_000u128, 4_000_000u128);
    let p = intermediate_scaling_point(gamma, alpha, lambda, SEED)?;
    let code = p.prefix_code(n_hi as usize + 100_000)?;
    let mut worst = 0.0f64;
    let (mut first, mut last) = (0, 0);
    for m in 1..=code.len() {
        let n = code.n_at(m);
        if n < n_lo || n > n_hi {
            continue;
        }
        if first == 0 {
            first = m;
        }
        last = m;
        let v = code.f_at(m) as f64 / alpha / (n as f64).powf(gamma);
        worst = worst.max((v - 1.0).abs());
    }
    let mut out = vec![CheckReport::within("f_over_N_gamma", worst, 0.05).with_window(first as u128, last as u128)];

    let share = decade_maxima(&code, 3, n_hi, |m| code.block(m) as f64 / code.n_at(m) as f64);
    let square = decade_maxima(&code, 3, n_hi, |m| {
        let b = code.block(m) as f64;
        b * b / (code.n_at(m) as f64).powf(gamma)
    });
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    out.push(
        CheckReport::new("block_share_decays", decreasing(&share), *share.last().unwrap_or(&f64::NAN))
            .with_detail(format!("decade maxima {share:.4?}")),
    );
    out.push(
        CheckReport::new("block_square_share_decays", decreasing(&square), *square.last().unwrap_or(&f64::NAN))
            .with_detail(format!("decade maxima {square:.4?}")),
    );

    let n = 1_000_000u128;
    let b = birkhoff_block_form(&code, n)?;
    let scale = 1.0 / ((n as f64).powf(gamma) * std::f64::consts::LN_2);
    let (lo, hi) = (-b.hi * scale, -b.lo * scale);
    let upper = 1.05 + (n as f64).powf(-0.5) * LN_PI / std::f64::consts::LN_2;
    let excess = (0.95 - lo).max(hi - upper).max(0.0);
    out.push(
        CheckReport::new("birkhoff_enclosure", excess == 0.0, excess)
            .with_window(n, n)
            .with_detail(format!("[{lo:.6}, {hi:.6}] inside [0.95, {upper:.6}]")),
    );
    Ok(out)
}

/// A code whose large blocks can lift the filtered ratio.
pub fn planted_code(rng: &mut ChaCha8Rng, lambda: u64, len: usize) -> Result<AlternationCode> {
    let mut blocks = Vec::with_capacity(len);
    let mut n = 0u64;
    for _ in 0..len {
        let b = if rng.gen_bool(0.15) {
            rng.gen_range(lambda..=lambda + n / 2 + 1)
        } else {
            rng.gen_range(1..lambda)
        };
        n += b;
        blocks.push(b);
    }
    AlternationCode::from_blocks(blocks)
}

fn convexity() -> Result<Vec<CheckReport>> {
    let lambda = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut total = ConvexitySweep::default();
    let mut codes = 0;
    while total.convex < 1000 && codes < 1000 {
        let code = planted_code(&mut rng, lambda, 400)?;
        total.merge(&convexity_sweep(&code, lambda)?);
        codes += 1;
    }
    let small_bad = total.violations.iter().filter(|v| v.1 == crate::analyze::RhoCase::Small).count();
    let large_bad = total.violations.iter().filter(|v| v.1 == crate::analyze::RhoCase::LargeNotIncreasing).count();
    Ok(vec![
        CheckReport::new("qualifying_indices", total.convex >= 1000, total.convex as f64)
            .with_detail(format!("{codes} codes")),
        CheckReport::within("convex_combination", total.max_residual, 1e-10),
        CheckReport::new("small_block_keeps_rho", small_bad == 0, small_bad as f64)
            .with_detail(format!("{} indices", total.small)),
        CheckReport::new("large_block_raises_rho", large_bad == 0, large_bad as f64)
            .with_detail(format!("{} indices", total.not_increasing)),
    ])
}

fn dyadic_gap() -> Result<Vec<CheckReport>> {
    let zeros = EventuallyPeriodic::constant(0);
    let n_max = 1000;
    let finite: Vec<usize> = (1..=n_max)
        .into_par_iter()
        .filter_map(|n| match birkhoff_sum(&zeros, n, DEFAULT_LOOKAHEAD) {
            Ok(b) if b.lo == f64::NEG_INFINITY => None,
            _ => Some(n),
        })
        .collect();
    let mut out = vec![CheckReport::new("birkhoff_lower_is_minus_infinity", finite.is_empty(), finite.len() as f64)
        .with_window(1, n_max as u128)];
    let n = 1000usize;
    let b = cylinder_log_bounds(&BinaryWord::constant(0, n))?;
    let scale = -((n * n) as f64) * std::f64::consts::LN_2;
    let (lo, hi) = (b.hi / scale, b.lo / scale);
    let d = (lo - 1.0).abs().max((hi - 1.0).abs());
    out.push(
        CheckReport::within("constant_cylinder_scaling", d, 1e-2).with_detail(format!("[{lo:.6}, {hi:.6}] at n={n}")),
    );
    Ok(out)
}
