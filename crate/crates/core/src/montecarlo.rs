//! Shot-parallel Monte-Carlo driver.
//!
//! Shot `i` always draws from the stream `shot_rng(seed, i)`, and per-shot tallies are integer
//! counts merged by addition, so results are identical for every thread count.

use rand_chacha::ChaCha8Rng;

use crate::frame::shot_rng;

/// Shots handed to one task at a time.
const CHUNK: u64 = 2048;

/// Additive per-shot statistics.
pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

fn run_chunk<T, S, F>(c: u64, shots: u64, seed: u64, state: &mut S, f: &F) -> T
where
    T: Tally,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T,
{
    let mut acc = T::default();
    let end = ((c + 1) * CHUNK).min(shots);
    for s in c * CHUNK..end {
        let mut rng = shot_rng(seed, s);
        acc.merge(f(state, &mut rng));
    }
    acc
}

/// Runs `shots` independent shots and sums their tallies.
///
/// `init` creates per-worker scratch state. `threads = None` uses the default pool.
#[cfg(feature = "parallel")]
pub fn run_shots<T, S, I, F>(shots: u64, seed: u64, threads: Option<usize>, init: I, f: F) -> T
where
    T: Tally,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let chunks = shots.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map_init(&init, |state, c| run_chunk(c, shots, seed, state, &f))
            .reduce(T::default, |mut a, b| {
                a.merge(b);
                a
            })
    };
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        _ => work(),
    }
}

/// Runs `shots` independent shots and sums their tallies.
#[cfg(not(feature = "parallel"))]
pub fn run_shots<T, S, I, F>(shots: u64, seed: u64, _threads: Option<usize>, init: I, f: F) -> T
where
    T: Tally,
    I: Fn() -> S,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T,
{
    let mut state = init();
    let mut acc = T::default();
    for c in 0..shots.div_ceil(CHUNK) {
        acc.merge(run_chunk(c, shots, seed, &mut state, &f));
    }
    acc
}
