//! `mu([w])` through the iterated transfer operator,
//! `(L^N 1_[w])(x) = sum_{v in {0,1}^K} g_N(w v x)` with `N = |w| + K`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::{cylinder_log_bounds, LogBound};
use crate::error::{Error, Result};
use crate::numeric::Neumaier;
use crate::seqcore::{is_dyadic_prefix, BinaryWord, DyadicVerdict, EventuallyPeriodic, SymbolSource};

/// Default cap on `2^K (n + K)` per anchor, summed over anchors.
pub const DEFAULT_BUDGET: u128 = 1 << 32;

const ANCHOR_BITS: usize = 64;
const MAX_SPLIT_BITS: usize = 12;

#[derive(Clone)]
pub struct EstimateConfig {
    pub depth: usize,
    pub anchors: Vec<Arc<dyn SymbolSource>>,
    pub budget: u128,
}

impl EstimateConfig {
    pub fn new(depth: usize) -> Self {
        EstimateConfig {
            depth,
            anchors: default_anchors(),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_anchors(mut self, anchors: Vec<Arc<dyn SymbolSource>>) -> Self {
        self.anchors = anchors;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// `(01)^inf` and `(10)^inf`, binary values 1/3 and 2/3.
pub fn default_anchors() -> Vec<Arc<dyn SymbolSource>> {
    vec![
        Arc::new(EventuallyPeriodic::one_third()),
        Arc::new(EventuallyPeriodic::two_thirds()),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureEstimate {
    pub word: BinaryWord,
    pub depth: usize,
    /// Natural log of the anchor-averaged estimate.
    pub log_value: f64,
    /// Natural log of the estimate at each anchor.
    pub per_anchor: Vec<f64>,
    /// `max - min` of the per-anchor estimates, in value space.
    pub anchor_spread: f64,
    pub bounds: LogBound,
    pub inside_sandwich: bool,
}

impl MeasureEstimate {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Point state: binary value `t` of the sequence and `u` of its complement,
/// tracked separately so that `min(t, u)` keeps relative accuracy near 0.
#[derive(Clone, Copy, Debug)]
struct State {
    t: f64,
    u: f64,
}

impl State {
    fn from_bits(bits: &[u8]) -> State {
        let (mut t, mut u) = (0.5, 0.5);
        for &b in bits.iter().rev() {
            t = (b as f64 + t) * 0.5;
            u = ((1 - b) as f64 + u) * 0.5;
        }
        State { t, u }
    }

    /// Prepends `b`; returns the new state and `psi` at it.
    #[inline]
    fn prepend(self, b: u8) -> (State, f64) {
        let t = (b as f64 + self.t) * 0.5;
        let u = ((1 - b) as f64 + self.u) * 0.5;
        let s = (PI * t.min(u)).sin();
        (State { t, u }, 2.0 * s.ln())
    }
}

pub fn cylinder_measure_estimate(w: &BinaryWord, cfg: &EstimateConfig) -> Result<MeasureEstimate> {
    let k = cfg.depth;
    if k == 0 {
        return Err(Error::domain("depth must be at least 1"));
    }
    if cfg.anchors.is_empty() {
        return Err(Error::domain("at least one anchor is required"));
    }
    let needed = work(k, w.len(), cfg.anchors.len());
    if needed > cfg.budget {
        return Err(Error::Budget {
            needed,
            budget: cfg.budget,
        });
    }
    let mut starts = Vec::with_capacity(cfg.anchors.len());
    for a in &cfg.anchors {
        if !a.declared_nondyadic() || is_dyadic_prefix(a.as_ref(), ANCHOR_BITS)? != DyadicVerdict::Mixed {
            return Err(Error::DyadicAnchor { horizon: ANCHOR_BITS });
        }
        starts.push(State::from_bits(&a.window(0, ANCHOR_BITS)));
    }

    let split = k.min(MAX_SPLIT_BITS);
    let chunks = 1usize << split;
    // the word is prepended last, first symbol outermost
    let word_rev: Vec<u8> = w.bits().iter().rev().copied().collect();
    let jobs: Vec<(usize, usize)> = (0..starts.len())
        .flat_map(|a| (0..chunks).map(move |c| (a, c)))
        .collect();
    let partial: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(a, c)| chunk_sum(starts[a], c, split, k - split, &word_rev))
        .collect();

    let per_anchor: Vec<f64> = partial.chunks(chunks).map(combine).collect();
    let values: Vec<f64> = per_anchor.iter().map(|l| l.exp()).collect();
    let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().copied().fold(f64::INFINITY, f64::min);
    let log_value = crate::numeric::log_sum_exp(&per_anchor) - (per_anchor.len() as f64).ln();
    let bounds = if w.is_empty() {
        LogBound::point(0.0)
    } else {
        cylinder_log_bounds(w)?
    };
    let inside_sandwich = if w.is_empty() {
        true
    } else {
        bounds.strictly_contains(log_value) && per_anchor.iter().all(|&l| bounds.strictly_contains(l))
    };
    Ok(MeasureEstimate {
        word: w.clone(),
        depth: k,
        log_value,
        per_anchor,
        anchor_spread: spread,
        bounds,
        inside_sandwich,
    })
}

fn work(depth: usize, n: usize, anchors: usize) -> u128 {
    if depth >= 100 {
        return u128::MAX;
    }
    (1u128 << depth)
        .saturating_mul((n + depth) as u128)
        .saturating_mul(anchors as u128)
}

/// Log-sum of one subtree as `(max, sum exp(x - max))`.
fn chunk_sum(start: State, chunk: usize, split: usize, rest: usize, word_rev: &[u8]) -> (f64, f64) {
    // the symbols next to the anchor are v_K, v_{K-1}, ...; the chunk index
    // fixes the first `split` of them
    let mut st = start;
    let mut acc = 0.0;
    for i in (0..split).rev() {
        let (s, term) = st.prepend(((chunk >> i) & 1) as u8);
        st = s;
        acc += term;
    }
    let mut leaves = Vec::with_capacity(1 << rest);
    descend(st, acc, rest, word_rev, &mut leaves);
    let max = leaves.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (max, 0.0);
    }
    let mut sum = Neumaier::new();
    for &x in &leaves {
        sum.add((x - max).exp());
    }
    (max, sum.total())
}

fn descend(st: State, acc: f64, rest: usize, word_rev: &[u8], out: &mut Vec<f64>) {
    if rest == 0 {
        let mut st = st;
        let mut acc = acc;
        for &b in word_rev {
            let (s, term) = st.prepend(b);
            st = s;
            acc += term;
        }
        out.push(acc);
        return;
    }
    for b in 0..2u8 {
        let (s, term) = st.prepend(b);
        descend(s, acc + term, rest - 1, word_rev, out);
    }
}

fn combine(parts: &[(f64, f64)]) -> f64 {
    let max = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut sum = Neumaier::new();
    for &(m, s) in parts {
        if m > f64::NEG_INFINITY {
            sum.add(s * (m - max).exp());
        }
    }
    max + sum.total().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Flipped;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> BinaryWord {
        BinaryWord::parse(s).unwrap()
    }

    fn single(a: EventuallyPeriodic, depth: usize) -> EstimateConfig {
        EstimateConfig::new(depth).with_anchors(vec![Arc::new(a)])
    }

    #[test]
    fn half_on_the_first_cylinder() {
        let est = cylinder_measure_estimate(&w("0"), &EstimateConfig::new(20)).unwrap();
        assert!((est.value() - 0.5).abs() < 1e-3, "{}", est.value());
        assert!(est.anchor_spread < 1e-3);
        assert!(est.inside_sandwich);
    }

    #[test]
    fn additivity_at_a_fixed_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let len = rng.gen_range(1..8);
            let word: BinaryWord = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
            let k = 8;
            let a = EventuallyPeriodic::one_third();
            let e0 = cylinder_measure_estimate(&word.extended(0), &single(a.clone(), k)).unwrap();
            let e1 = cylinder_measure_estimate(&word.extended(1), &single(a.clone(), k)).unwrap();
            let e = cylinder_measure_estimate(&word, &single(a, k + 1)).unwrap();
            let lhs = e0.value() + e1.value();
            assert!((lhs - e.value()).abs() <= 1e-12 * e.value());
        }
    }

    #[test]
    fn flip_symmetry() {
        let word = w("0010111");
        let a = EventuallyPeriodic::new(w("1101"), w("001")).unwrap();
        let e = cylinder_measure_estimate(&word, &single(a.clone(), 10)).unwrap();
        let f = cylinder_measure_estimate(&word.flipped(), &single(a.flipped(), 10)).unwrap();
        assert!((e.value() - f.value()).abs() <= 1e-12 * e.value());
    }

    #[test]
    fn budget_and_anchor_errors() {
        let long = BinaryWord::constant(0, 40);
        let err = cylinder_measure_estimate(&long, &EstimateConfig::new(30)).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        let cfg = EstimateConfig::new(4).with_anchors(vec![Arc::new(EventuallyPeriodic::constant(0))]);
        assert!(matches!(
            cylinder_measure_estimate(&w("0"), &cfg),
            Err(Error::DyadicAnchor { .. })
        ));
        let wrapped: Arc<dyn SymbolSource> = Arc::new(Flipped(EventuallyPeriodic::one_third()));
        let cfg = EstimateConfig::new(4).with_anchors(vec![wrapped]);
        assert!(cylinder_measure_estimate(&w("0"), &cfg).is_ok());
        assert!(cylinder_measure_estimate(&w("0"), &EstimateConfig::new(0)).is_err());
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let word = w("0110");
        let cfg = EstimateConfig::new(14);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| cylinder_measure_estimate(&word, &cfg).unwrap());
        let b = four.install(|| cylinder_measure_estimate(&word, &cfg).unwrap());
        assert_eq!(a.log_value.to_bits(), b.log_value.to_bits());
    }

    #[test]
    fn spread_shrinks_with_depth() {
        let word = w("011");
        let mut last = f64::INFINITY;
        for k in [4usize, 8, 12, 16] {
            let e = cylinder_measure_estimate(&word, &EstimateConfig::new(k)).unwrap();
            assert!(e.anchor_spread <= 10.0 * last);
            last = e.anchor_spread;
        }
        assert!(last < 1e-4);
    }
}
