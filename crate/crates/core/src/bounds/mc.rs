//! Seeded, chunked Monte Carlo.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from ChaCha8 stream `c` of the
//! run seed. Results are merged in chunk order, so output does not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: u64 = 4096;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `f(rng, count)` on every chunk and return the per-chunk results in order.
pub fn run_chunks<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials - c * CHUNK);
            f(&mut chunk_rng(seed, c), count)
        })
        .collect()
}

/// Mean and standard error of a Bernoulli count.
pub fn proportion(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunked_runs_are_deterministic_across_pools() {
        let f = |rng: &mut ChaCha8Rng, n: u64| (0..n).map(|_| rng.random::<u32>() as u64).sum::<u64>();
        let a = run_chunks(42, 20_000, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_chunks(42, 20_000, f));
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert_ne!(a, run_chunks(43, 20_000, f));
    }
}
