//! Reproducible per-task random streams.
//!
//! Every task owns a ChaCha8 stream selected by `(master seed, task id)`.
//! Streams are platform independent, so results never depend on which
//! thread ran a task.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream `task` of the generator seeded with `seed`.
pub fn derive_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// A child seed: the first word of stream `task`.
pub fn derive_seed(seed: u64, task: u64) -> u64 {
    derive_rng(seed, task).next_u64()
}
