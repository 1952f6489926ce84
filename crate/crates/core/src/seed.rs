//! Seed derivation for independent random streams.
//!
//! A stream seed is `splitmix64(master ^ splitmix64(index + 1))`, so seeds for
//! replicate `r` depend only on the master seed and `r`, never on the order or
//! thread in which replicates run.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

/// Sub-streams used inside one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Graph = 1,
    Truth = 2,
    Data = 3,
    Chain = 4,
    Baseline = 5,
}

pub fn stream(replicate_seed: u64, s: Stream) -> u64 {
    derive(replicate_seed, 1 << 32 | s as u64)
}
