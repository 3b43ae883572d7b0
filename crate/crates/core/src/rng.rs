//! Counter-keyed random streams.
//!
//! A stream is addressed by `(seed, purpose, block)`; ChaCha's 64-bit stream
//! selector carries `purpose << 32 | block`, so the numbers drawn for a block
//! never depend on which worker evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes. Distinct purposes never share key material.
pub mod purpose {
    pub const CONFIG: u32 = 1;
    pub const QMC_SHIFT: u32 = 2;
    pub const MONTE_CARLO: u32 = 3;
    pub const RESTART: u32 = 4;
    pub const PROPERTY: u32 = 5;
    pub const CORPUS: u32 = 6;
}

pub fn block_rng(seed: u64, purpose: u32, block: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | block as u64);
    rng
}
