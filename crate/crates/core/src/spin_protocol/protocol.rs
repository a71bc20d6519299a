use super::hamiltonian::{
    dipole_hamiltonian, field_hamiltonian, integrated_hamiltonian, protocol_hamiltonian_fn,
};
use super::state::initial_state;
use super::{spin_basis, ProtocolParams, PARTICLE1, PARTICLE2};
use crate::error::Result;
use crate::measurement::{
    born_probabilities, collapse, EnergyLedger, LedgerEvent, MeasurementBasis, OutcomeRecord,
};
use crate::propagators::{evolve_magnus1, evolve_ordered, TimeGrid};
use crate::quantum_core::{expectation, BasisLabel, Operator, StateVector};

/// Steps used by the time-ordered propagator unless overridden.
pub const DEFAULT_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    /// `exp(−i∫H)` with the closed-form integrated matrix.
    Magnus1,
    /// Exponential-midpoint stepping of `H(t)` across the window.
    Ordered,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    /// State at `t_f`, before the probe is read out.
    pub pre_measurement: StateVector,
    pub probabilities: Vec<f64>,
    pub outcome: OutcomeRecord,
    pub ledger: EnergyLedger,
    /// Ordered mode only: `‖ψ(N) − ψ(N/2)‖`.
    pub residual: Option<f64>,
    pub norm_drift: f64,
    /// `⟨ω S₁ᶻ⟩` before the fly-by.
    pub initial_energy: f64,
    /// `⟨ω S₁ᶻ⟩` after the probe measurement.
    pub final_energy: f64,
    pub delta_e: f64,
}

impl ProtocolRun {
    pub fn final_state(&self) -> &StateVector {
        &self.outcome.post_state
    }
}

/// `±y` basis of the probe spin.
pub fn probe_measurement_basis() -> Result<MeasurementBasis> {
    let probe = BasisLabel::new(vec![spin_basis().subsystem(PARTICLE2)?.clone()])?;
    MeasurementBasis::spin_y(probe)
}

/// Fly-by over `[t₀, t_f]`, then a `±y` readout of the probe spin.
///
/// The ledger tracks the spin energy `ω S₁ᶻ ⊗ 1₂`; the probe sees no field,
/// so its part is identically zero, and the dipole energy is stored as a
/// separate part evaluated at the entry time.
pub fn run_protocol(
    p: &ProtocolParams,
    propagator: Propagator,
    steps: usize,
    seed: u64,
) -> Result<ProtocolRun> {
    p.validate()?;
    let psi0 = initial_state(p);
    let (pre, residual, norm_drift) = match propagator {
        Propagator::Magnus1 => {
            let hfn = protocol_hamiltonian_fn(p);
            let grid = TimeGrid::new(p.t0, p.tf, 2)?;
            let integral = integrated_hamiltonian(p, p.tf);
            let psi = evolve_magnus1(&hfn, &grid, &psi0, Some(&integral))?;
            let drift = (psi.norm() - 1.0).abs();
            (psi, None, drift)
        }
        Propagator::Ordered => {
            let hfn = protocol_hamiltonian_fn(p);
            let grid = TimeGrid::new(p.t0, p.tf, steps)?;
            let run = evolve_ordered(&hfn, &grid, &psi0)?;
            (run.state, run.residual, run.norm_drift)
        }
    };

    let probabilities = born_probabilities(&pre, &probe_measurement_basis()?)?;
    let outcome = collapse(&pre, &probe_measurement_basis()?, seed)?;

    let field = field_hamiltonian(p);
    let probe_field = Operator::zero(spin_basis());
    let mut ledger = EnergyLedger::new();
    let stages = [
        (&psi0, &psi0, LedgerEvent::Evolve, p.t0),
        (&psi0, &pre, LedgerEvent::Evolve, p.tf),
        (&pre, &outcome.post_state, LedgerEvent::Collapse, p.tf),
    ];
    for (before, after, event, t) in stages {
        let dipole = dipole_hamiltonian(p, t);
        let parts = [
            (PARTICLE1, &field),
            (PARTICLE2, &probe_field),
            ("interaction", &dipole),
        ];
        ledger.record_parts(&field, before, after, event, t, &parts, None)?;
    }

    let initial_energy = expectation(&field, &psi0)?;
    let final_energy = expectation(&field, &outcome.post_state)?;
    Ok(ProtocolRun {
        pre_measurement: pre,
        probabilities,
        outcome,
        ledger,
        residual,
        norm_drift,
        initial_energy,
        final_energy,
        delta_e: final_energy - initial_energy,
    })
}
