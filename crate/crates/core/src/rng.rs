//! Seeded random streams.
//!
//! Every Monte Carlo loop in the crate is split into fixed-size chunks;
//! chunk `k` of a run with master seed `s` draws from the ChaCha8 stream
//! `k` keyed by `s` (see [`stream`]). Chunk sizes do not depend on the
//! worker count, so results are identical for any number of threads, and
//! reductions are always taken in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub type SteinRng = ChaCha8Rng;

/// Draws per Monte Carlo chunk.
pub const CHUNK: usize = 4096;

/// The generator for stream `index` under master `seed`.
pub fn stream(seed: u64, index: u64) -> SteinRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A per-task master seed: SplitMix64 finalizer applied to
/// `seed + (index + 1)·φ`, where φ is the 64-bit golden-ratio constant.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `draw` `reps` times, in parallel over chunks, returning the draws
/// in a worker-count-independent order.
pub fn par_draws<T, F>(reps: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SteinRng) -> T + Sync,
{
    let chunks = reps.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            let len = CHUNK.min(reps - k * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// A Monte Carlo mean with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub reps: usize,
    pub seed: u64,
}

impl Estimate {
    /// |mean − target| ≤ k·SE.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_err
    }
}

/// Mean and standard error of `reps` parallel draws of `draw`.
pub fn mc_mean<F>(reps: usize, seed: u64, draw: F) -> Estimate
where
    F: Fn(&mut SteinRng) -> f64 + Sync,
{
    let xs = par_draws(reps, seed, draw);
    let (mean, std_err) = mean_se(&xs);
    Estimate { mean, std_err, reps, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn draws_do_not_depend_on_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| par_draws(10_000, 7, |r| r.gen::<u64>()))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream(1, 0).gen();
        let b: u64 = stream(1, 1).gen();
        assert_ne!(a, b);
    }
}
