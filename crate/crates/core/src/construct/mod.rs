//! Explicit points with prescribed scaling of their alternation blocks, and
//! the auxiliary measures used for dimension bounds.
//!
//! A constructed point fixes a set of positions: long runs of zeros on a
//! schedule of intervals `M`, plus a `10` pair at every multiple of `Λ`
//! outside `M`. All other positions are free and filled from a seeded
//! ChaCha8 stream with random access.

mod bernoulli;
mod bounded;
mod fiber;
mod idealized;
mod intermediate;
mod joint;

pub use bernoulli::{BlockBernoulliMeasure, CylinderMeasure};
pub use bounded::{bounded_block_point, BoundedBlockSource};
pub use fiber::{fiber_dimension_bound, fiber_measure, FiberMeasure, PredicatePositions};
pub use idealized::{idealized_block_simulation, pivot_block_simulation, CycleTrace, PivotTrace};
pub use intermediate::{intermediate_scaling_point, select_r, IntermediateSchedule};
pub use joint::{joint_parameters, joint_spectrum_point, JointParameters, JointSchedule};

use std::sync::Arc;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seqcore::{complete_blocks_of_prefix, AlternationCode, BinaryWord, SymbolSource};
use crate::Result;

/// Largest position for which schedules are materialized.
pub const MAX_HORIZON: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PositionRole {
    /// Inside a scheduled zero run (or the leading symbol when it is fixed).
    Fixed0,
    /// The `1` of a `10` pair on the `Λ`-grid.
    PairOne,
    /// The `0` of a `10` pair.
    PairZero,
    Free,
}

impl PositionRole {
    pub fn prescribed(self) -> Option<u8> {
        match self {
            PositionRole::Fixed0 | PositionRole::PairZero => Some(0),
            PositionRole::PairOne => Some(1),
            PositionRole::Free => None,
        }
    }
}

/// Which positions a construction pins down, and to what.
pub trait DeterminedPositions: Send + Sync {
    /// Role of position `n >= 1`.
    fn role(&self, n: u64) -> PositionRole;

    fn is_determined(&self, n: u64) -> bool {
        self.role(n) != PositionRole::Free
    }

    fn prescribed(&self, n: u64) -> Option<u8> {
        self.role(n).prescribed()
    }
}

/// A set of positions where the point is constant zero.
pub trait ZeroSchedule: Send + Sync {
    fn contains(&self, n: u64) -> bool;
}

/// Zero runs from a schedule, `10` pairs at multiples of `Λ` outside it.
pub struct GridRule<Z> {
    pub zeros: Z,
    pub lambda: u64,
    pub fix_first: bool,
}

impl<Z: ZeroSchedule> DeterminedPositions for GridRule<Z> {
    fn role(&self, n: u64) -> PositionRole {
        if self.zeros.contains(n) {
            PositionRole::Fixed0
        } else if n % self.lambda == 0 {
            PositionRole::PairOne
        } else if n > 1 && (n - 1) % self.lambda == 0 && !self.zeros.contains(n - 1) {
            PositionRole::PairZero
        } else if n == 1 && self.fix_first {
            PositionRole::Fixed0
        } else {
            PositionRole::Free
        }
    }
}

/// No position is determined.
pub struct Undetermined;

impl DeterminedPositions for Undetermined {
    fn role(&self, _: u64) -> PositionRole {
        PositionRole::Free
    }
}

/// Reproducible i.i.d. uniform bits: bit `k` is bit `(k-1) mod 32` of word
/// `(k-1) / 32` of the ChaCha8 stream seeded with `seed`.
#[derive(Clone)]
pub struct FreeBits {
    proto: ChaCha8Rng,
}

impl FreeBits {
    pub fn new(seed: u64) -> Self {
        FreeBits {
            proto: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn bit(&self, k: u64) -> u8 {
        let i = k - 1;
        let mut rng = self.proto.clone();
        rng.set_word_pos((i / 32) as u128);
        ((rng.next_u32() >> (i % 32)) & 1) as u8
    }

    /// Bits `start+1 ..= start+len`.
    pub fn window(&self, start: u64, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return out;
        }
        let mut rng = self.proto.clone();
        let mut word_idx = start / 32;
        rng.set_word_pos(word_idx as u128);
        let mut word = rng.next_u32();
        let mut i = start;
        while out.len() < len {
            if i / 32 != word_idx {
                word_idx = i / 32;
                word = rng.next_u32();
            }
            out.push(((word >> (i % 32)) & 1) as u8);
            i += 1;
        }
        out
    }
}

/// A point determined by a [`DeterminedPositions`] rule, with free
/// positions filled from [`FreeBits`].
pub struct RuleSource<R> {
    pub rule: R,
    pub free: FreeBits,
}

impl<R: DeterminedPositions> SymbolSource for RuleSource<R> {
    fn bit(&self, k: u64) -> u8 {
        match self.rule.prescribed(k) {
            Some(b) => b,
            None => self.free.bit(k),
        }
    }

    fn declared_nondyadic(&self) -> bool {
        // grid pairs recur forever
        true
    }

    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        let mut bits = self.free.window(start, len);
        for (i, b) in bits.iter_mut().enumerate() {
            if let Some(p) = self.rule.prescribed(start + 1 + i as u64) {
                *b = p;
            }
        }
        bits
    }
}

impl<R: DeterminedPositions> DeterminedPositions for RuleSource<R> {
    fn role(&self, n: u64) -> PositionRole {
        self.rule.role(n)
    }
}

/// Parameters and derived quantities recorded with a constructed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointMeta {
    Joint {
        alpha: f64,
        beta: f64,
        lambda: u64,
        seed: u64,
        /// `None` for `alpha = 0`, where the schedule varies per cycle.
        ell: Option<f64>,
        m: Option<f64>,
        theta0: u64,
    },
    Intermediate {
        gamma: f64,
        alpha: f64,
        lambda: u64,
        seed: u64,
        r: u32,
        delta: f64,
        coefficient: f64,
        k0: u64,
    },
    Bounded {
        lambda: u64,
        seed: u64,
    },
}

/// A reproducible infinite binary sequence together with the positions its
/// construction prescribes.
#[derive(Clone)]
pub struct ConstructedPoint {
    pub meta: PointMeta,
    source: Arc<dyn SymbolSource>,
    positions: Arc<dyn DeterminedPositions>,
    blocks: Option<Arc<dyn BlockSchedule>>,
}

/// Block intervals `[lo, hi]` of a schedule, in increasing order.
pub trait BlockSchedule: Send + Sync {
    /// Scheduled zero runs intersecting `[1, horizon]`.
    fn intervals_up_to(&self, horizon: u64) -> Vec<(u64, u64)>;
}

impl ConstructedPoint {
    pub(crate) fn new(
        meta: PointMeta,
        source: Arc<dyn SymbolSource>,
        positions: Arc<dyn DeterminedPositions>,
        blocks: Option<Arc<dyn BlockSchedule>>,
    ) -> Self {
        ConstructedPoint {
            meta,
            source,
            positions,
            blocks,
        }
    }

    pub fn source(&self) -> Arc<dyn SymbolSource> {
        self.source.clone()
    }

    pub fn positions(&self) -> Arc<dyn DeterminedPositions> {
        self.positions.clone()
    }

    pub fn role(&self, n: u64) -> PositionRole {
        self.positions.role(n)
    }

    /// Scheduled zero runs up to `horizon`, empty for unscheduled points.
    pub fn scheduled_runs(&self, horizon: u64) -> Vec<(u64, u64)> {
        self.blocks
            .as_ref()
            .map(|b| b.intervals_up_to(horizon))
            .unwrap_or_default()
    }

    pub fn seed(&self) -> u64 {
        match self.meta {
            PointMeta::Joint { seed, .. } | PointMeta::Intermediate { seed, .. } | PointMeta::Bounded { seed, .. } => {
                seed
            }
        }
    }

    pub fn lambda(&self) -> u64 {
        match self.meta {
            PointMeta::Joint { lambda, .. }
            | PointMeta::Intermediate { lambda, .. }
            | PointMeta::Bounded { lambda, .. } => lambda,
        }
    }

    /// Alternation code of the first `len` symbols, without the open last block.
    pub fn prefix_code(&self, len: usize) -> Result<AlternationCode> {
        complete_blocks_of_prefix(self.source.as_ref(), len)
    }
}

impl SymbolSource for ConstructedPoint {
    fn bit(&self, k: u64) -> u8 {
        self.source.bit(k)
    }
    fn declared_nondyadic(&self) -> bool {
        self.source.declared_nondyadic()
    }
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        self.source.window(start, len)
    }
    fn prefix(&self, len: usize) -> BinaryWord {
        self.source.prefix(len)
    }
}

impl DeterminedPositions for ConstructedPoint {
    fn role(&self, n: u64) -> PositionRole {
        self.positions.role(n)
    }
}

/// Sorted disjoint closed intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<(u64, u64)>,
}

impl IntervalSet {
    pub(crate) fn new(intervals: Vec<(u64, u64)>) -> Self {
        debug_assert!(intervals.windows(2).all(|w| w[0].1 < w[1].0));
        IntervalSet { intervals }
    }

    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.intervals
    }
}

impl ZeroSchedule for IntervalSet {
    fn contains(&self, n: u64) -> bool {
        let i = self.intervals.partition_point(|&(_, hi)| hi < n);
        i < self.intervals.len() && self.intervals[i].0 <= n
    }
}

impl<Z: ZeroSchedule + ?Sized> ZeroSchedule for Arc<Z> {
    fn contains(&self, n: u64) -> bool {
        (**self).contains(n)
    }
}

impl BlockSchedule for IntervalSet {
    fn intervals_up_to(&self, horizon: u64) -> Vec<(u64, u64)> {
        self.intervals.iter().copied().take_while(|&(lo, _)| lo <= horizon).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_bits_random_access_matches_stream() {
        let fb = FreeBits::new(42);
        let w = fb.window(0, 300);
        for k in 1..=300u64 {
            assert_eq!(fb.bit(k), w[k as usize - 1]);
        }
        let tail = fb.window(77, 100);
        assert_eq!(&tail[..], &w[77..177]);
        let ones = w.iter().filter(|&&b| b == 1).count();
        assert!((100..200).contains(&ones));
    }

    #[test]
    fn grid_roles() {
        let rule = GridRule {
            zeros: IntervalSet::new(vec![(10, 20)]),
            lambda: 4,
            fix_first: true,
        };
        assert_eq!(rule.role(1), PositionRole::Fixed0);
        assert_eq!(rule.role(4), PositionRole::PairOne);
        assert_eq!(rule.role(5), PositionRole::PairZero);
        assert_eq!(rule.role(12), PositionRole::Fixed0);
        assert_eq!(rule.role(13), PositionRole::Fixed0);
        assert_eq!(rule.role(21), PositionRole::Free);
        assert_eq!(rule.role(24), PositionRole::PairOne);
        assert_eq!(rule.role(3), PositionRole::Free);
    }

    #[test]
    fn interval_membership() {
        let s = IntervalSet::new(vec![(3, 5), (9, 9), (20, 30)]);
        let members: Vec<u64> = (1..=32).filter(|&n| s.contains(n)).collect();
        let mut expected = vec![3, 4, 5, 9];
        expected.extend(20..=30);
        assert_eq!(members, expected);
    }
}
