//! Trial fan-out: every Monte Carlo experiment runs N independent trials,
//! each seeded by `derive_seed(master, index)`. With the `parallel` feature
//! (default) trials spread across the rayon pool; the sequential fallback
//! produces bit-identical results because merging is by trial index either
//! way.

use crate::rng::{derive_seed, SimRng};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `trials` independent trials sequentially. Always available; the
/// reference semantics the parallel path must match.
pub fn run_trials_seq<T, F>(trials: u64, master_seed: u64, f: F) -> Vec<T>
where
    F: Fn(u64, &mut SimRng) -> T,
{
    (0..trials)
        .map(|i| {
            let mut rng = SimRng::from_seed(derive_seed(master_seed, i));
            f(i, &mut rng)
        })
        .collect()
}

/// Run `trials` independent trials, in parallel when the `parallel` feature
/// is enabled. Output order and content are identical to [`run_trials_seq`].
#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(trials: u64, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = SimRng::from_seed(derive_seed(master_seed, i));
            f(i, &mut rng)
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(trials: u64, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync,
{
    run_trials_seq(trials, master_seed, f)
}
