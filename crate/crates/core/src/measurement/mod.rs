//! Projective measurement: Born-rule probabilities, seeded collapse,
//! entanglement diagnostics and the energy ledger.

mod basis;
mod born;
mod entanglement;
mod ledger;
mod sampler;

pub use basis::MeasurementBasis;
pub use born::{born_probabilities, collapse, project_onto, OutcomeRecord};
pub use entanglement::{entanglement_eigenvalues, entropy_of, von_neumann_entropy};
pub use ledger::{BranchTag, EnergyLedger, LedgerEntry, LedgerEvent};
pub use sampler::OutcomeSampler;

/// Probabilities in `(−PROB_CLIP, 0)` are clamped to zero before sampling.
pub const PROB_CLIP: f64 = 1e-12;
