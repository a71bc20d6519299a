use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Draws the single uniform variate that selects a measurement outcome.
///
/// The stream is SplitMix64 seeded directly from the 64-bit seed; the first
/// output `x` maps to `u = ((x >> 11) + 1) · 2⁻⁵³ ∈ (0, 1]`, so `u` can never
/// select an outcome of zero probability.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    rng: SplitMix64,
}

impl OutcomeSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        let x = self.rng.next_u64();
        ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Smallest index with nonzero probability whose cumulative sum reaches
    /// `u`; falls back to the last nonzero outcome when round-off leaves the
    /// total just below `u`.
    pub fn pick(&mut self, probabilities: &[f64]) -> usize {
        let u = self.uniform();
        select(probabilities, u)
    }
}

pub(crate) fn select(probabilities: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last = None;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cum += p;
        last = Some(i);
        if cum >= u {
            return i;
        }
    }
    last.expect("at least one outcome has positive probability")
}
