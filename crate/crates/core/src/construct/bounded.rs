//! Points whose alternation blocks are i.i.d. uniform on `[1, Λ]`.

use std::sync::{Arc, RwLock};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ConstructedPoint, PointMeta, Undetermined};
use crate::error::{Error, Result};
use crate::seqcore::SymbolSource;

struct Blocks {
    rng: ChaCha8Rng,
    // ends[i] = N_{i+1}
    ends: Vec<u64>,
}

pub struct BoundedBlockSource {
    lambda: u64,
    blocks: RwLock<Blocks>,
}

impl BoundedBlockSource {
    pub fn new(lambda: u64, seed: u64) -> Self {
        BoundedBlockSource {
            lambda,
            blocks: RwLock::new(Blocks {
                rng: ChaCha8Rng::seed_from_u64(seed),
                ends: Vec::new(),
            }),
        }
    }

    /// Generates blocks until `done` holds.
    fn extend_until(&self, done: impl Fn(&[u64]) -> bool) {
        if done(&self.blocks.read().unwrap().ends) {
            return;
        }
        let mut b = self.blocks.write().unwrap();
        while !done(&b.ends) {
            let len = b.rng.gen_range(1..=self.lambda);
            let end = b.ends.last().copied().unwrap_or(0) + len;
            b.ends.push(end);
        }
    }

    fn ensure(&self, k: u64) {
        self.extend_until(|ends| ends.last().is_some_and(|&e| e >= k));
    }

    /// The first `count` block lengths.
    pub fn block_lengths(&self, count: usize) -> Vec<u64> {
        self.extend_until(|ends| ends.len() >= count);
        let b = self.blocks.read().unwrap();
        let mut prev = 0;
        b.ends[..count]
            .iter()
            .map(|&e| {
                let l = e - prev;
                prev = e;
                l
            })
            .collect()
    }
}

impl SymbolSource for BoundedBlockSource {
    fn bit(&self, k: u64) -> u8 {
        self.ensure(k);
        let b = self.blocks.read().unwrap();
        (b.ends.partition_point(|&e| e < k) % 2) as u8
    }

    fn declared_nondyadic(&self) -> bool {
        true
    }

    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        if len == 0 {
            return Vec::new();
        }
        self.ensure(start + len as u64);
        let b = self.blocks.read().unwrap();
        let mut i = b.ends.partition_point(|&e| e < start + 1);
        let mut out = Vec::with_capacity(len);
        for k in start + 1..=start + len as u64 {
            while b.ends[i] < k {
                i += 1;
            }
            out.push((i % 2) as u8);
        }
        out
    }
}

pub fn bounded_block_point(lambda: u64, seed: u64) -> Result<ConstructedPoint> {
    if lambda < 2 {
        return Err(Error::Infeasible(format!("lambda must be at least 2, got {lambda}")));
    }
    let source = Arc::new(BoundedBlockSource::new(lambda, seed));
    Ok(ConstructedPoint::new(
        PointMeta::Bounded { lambda, seed },
        source,
        Arc::new(Undetermined),
        None,
    ))
}
