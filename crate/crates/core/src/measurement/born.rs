use super::{MeasurementBasis, OutcomeSampler, PROB_CLIP};
use crate::error::{Error, Result};
use crate::quantum_core::{expectation, StateVector};

/// One sampled measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord {
    pub outcome: usize,
    pub label: String,
    pub probability: f64,
    /// `P_i|ψ⟩/√p_i`, first nonzero amplitude real positive.
    pub post_state: StateVector,
    pub rng_seed: u64,
}

/// `p_i = ⟨ψ|P_i|ψ⟩` for every outcome of `basis`.
pub fn born_probabilities(psi: &StateVector, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    let n2 = psi.norm().powi(2);
    if (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n2));
    }
    let probs = basis
        .embedded(psi.basis())?
        .iter()
        .map(|p| expectation(p, psi))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = probs.iter().sum();
    if (total - n2).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(probs)
}

/// Post-measurement state for a chosen outcome, with its probability.
pub fn project_onto(
    psi: &StateVector,
    basis: &MeasurementBasis,
    outcome: usize,
) -> Result<(f64, StateVector)> {
    let projectors = basis.embedded(psi.basis())?;
    let p = projectors.get(outcome).ok_or(Error::Dimension {
        expected: projectors.len(),
        got: outcome + 1,
    })?;
    let prob = expectation(p, psi)?;
    if prob <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "outcome {outcome} has zero probability"
        )));
    }
    let post = StateVector::normalized_vector(psi.basis().clone(), p.apply_raw(psi)?)?;
    Ok((prob, post.with_canonical_phase()))
}

/// Samples an outcome with one uniform draw from the seeded sampler and
/// collapses onto it.
pub fn collapse(psi: &StateVector, basis: &MeasurementBasis, seed: u64) -> Result<OutcomeRecord> {
    let probs: Vec<f64> = born_probabilities(psi, basis)?
        .into_iter()
        .map(|p| if p < 0.0 && p > -PROB_CLIP { 0.0 } else { p })
        .collect();
    let outcome = OutcomeSampler::new(seed).pick(&probs);
    let (probability, post_state) = project_onto(psi, basis, outcome)?;
    Ok(OutcomeRecord {
        outcome,
        label: basis.labels()[outcome].clone(),
        probability,
        post_state,
        rng_seed: seed,
    })
}
