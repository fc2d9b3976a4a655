//! Seeded inputs shared by the benchmarks.

use procrustes_core::{sample, Dataset, SpdMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 7;

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// Two well-conditioned `n×n` SPD matrices.
pub fn spd_pair(n: usize) -> (SpdMatrix, SpdMatrix) {
    let mut r = rng();
    (sample::random_spd(&mut r, n), sample::random_spd(&mut r, n))
}

/// Two point clouds in `dim` dimensions with `m` and `n` samples.
pub fn datasets(m: usize, n: usize, dim: usize) -> (Dataset, Dataset) {
    let mut r = rng();
    (
        sample::random_dataset(&mut r, m, dim, 0.0),
        sample::random_dataset(&mut r, n, dim, 0.5),
    )
}
