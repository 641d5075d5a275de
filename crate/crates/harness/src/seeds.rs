//! Per-run seed derivation.
//!
//! A run's seed depends only on the base seed and the run's grid coordinates,
//! so any single run can be reproduced alone and scheduling cannot change it.

/// Grid family a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Drpa,
    PaBaseline,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 chained over `(base_seed, stream, beta index, r index, run index)`.
pub fn derive_seed(base_seed: u64, stream: Stream, beta_index: u32, r_index: u32, run: u32) -> u64 {
    let tag = match stream {
        Stream::Drpa => 0,
        Stream::PaBaseline => 1,
    };
    [tag, u64::from(beta_index), u64::from(r_index), u64::from(run)]
        .into_iter()
        .fold(splitmix(base_seed), |acc, x| splitmix(acc ^ splitmix(x)))
}
