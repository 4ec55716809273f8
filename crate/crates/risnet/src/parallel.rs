//! Deterministic parallel Monte Carlo.
//!
//! Samples are drawn in chunks of [`CHUNK`]. Chunk `k` uses a ChaCha8
//! generator seeded with the run seed on stream `k`, and partial results are
//! combined in chunk order, so the output does not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: usize = 4096;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "RISNET_THREADS";

/// Generator of chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Seed of an independent sub-experiment `k` of a run.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs `f(rng, count)` on every chunk of `n` samples and returns the chunk
/// results in order.
pub fn map_chunks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            f(&mut chunk_rng(seed, k as u64), len)
        })
        .collect()
}

/// Worker count: the available parallelism, capped by `RISNET_THREADS`.
pub fn thread_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

/// A pool sized by [`thread_count`].
pub fn thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .expect("thread pool")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunks_cover_the_sample_count() {
        let sizes = map_chunks(2 * CHUNK + 5, 3, |_, len| len);
        assert_eq!(sizes, vec![CHUNK, CHUNK, 5]);
    }

    #[test]
    fn results_do_not_depend_on_the_pool() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| map_chunks(5 * CHUNK, 11, |rng, len| (0..len).map(|_| rng.random::<f64>()).sum::<f64>()))
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn streams_differ() {
        let a: u64 = chunk_rng(1, 0).random();
        let b: u64 = chunk_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, chunk_rng(1, 0).random::<u64>());
    }
}
