//! Deterministic seed derivation.
//!
//! A single master seed expands into independent per-stage seeds so that
//! every stochastic step (split, init, shuffles, background choice,
//! coalition sampling) is reproducible on its own.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pipeline stages that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Split,
    Init,
    Shuffle,
    Background,
    ExplainSelection,
    Coalitions,
    Synthetic,
}

impl Stage {
    fn tag(self) -> u64 {
        match self {
            Stage::Split => 0x5350_4c49,
            Stage::Init => 0x494e_4954,
            Stage::Shuffle => 0x5348_5546,
            Stage::Background => 0x4247_524e,
            Stage::ExplainSelection => 0x4558_504c,
            Stage::Coalitions => 0x434f_414c,
            Stage::Synthetic => 0x5359_4e54,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(master: u64, stage: Stage) -> u64 {
    mix(master ^ mix(stage.tag()))
}

/// Seed for the `index`-th item of a stage (e.g. one explained instance).
pub fn derive_indexed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index.wrapping_add(1)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded uniform permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    idx
}
