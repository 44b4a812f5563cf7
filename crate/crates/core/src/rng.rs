use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic random source for every stochastic step in the lab.
///
/// Two `SimRng`s built from the same seed produce identical sequences on
/// every platform, which is what makes whole experiment runs replayable
/// from a single `u64`.
#[derive(Debug, Clone)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform draw in [0, 1).
    pub fn f64(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform integer in [0, bound).
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "index bound must be positive");
        self.0.random_range(0..bound)
    }

    pub fn bit(&mut self) -> u8 {
        u8::from(self.0.random::<bool>())
    }

    /// Bernoulli draw with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.f64() < p
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn fill_bytes(&mut self, out: &mut [u8]) {
        self.0.fill_bytes(out);
    }

    pub fn u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Child generator for subsystem `index`, independent of draws made so far.
    pub fn derive(&self, index: u64) -> SimRng {
        let mut base = self.clone();
        SimRng::from_seed(derive_seed(base.u64(), index))
    }
}

/// Seed for trial `index` of a run keyed by `master`.
///
/// SplitMix64 finalizer over the combined words: cheap, stateless, and free
/// of the lane correlation that plain `master + index` would produce.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
