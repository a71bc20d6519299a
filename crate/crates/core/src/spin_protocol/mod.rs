//! Two-spin dipole–dipole measurement protocol.
//!
//! Spin 1 sits at the origin in a field along `z` (Larmor frequency `ω`);
//! spin 2 flies past on the line `(vt, b, 0)`. The dipole coupling entangles
//! the spins; measuring spin 2 along `y` afterwards leaves spin 1 in a `z`
//! eigenstate with energy `±ω/2`, although it started with `⟨H⟩ = 0`.
//!
//! Natural units throughout (`ħ = c = 1`). The coupling integrals `θ`, `ξ`
//! are accumulated from `t → −∞`; the field phase `Ω = ω(t − t₀)` uses the
//! finite start time `t₀` of the configured window. Reduced-state spectra and
//! outcome probabilities do not depend on `t₀`; phases do.

mod hamiltonian;
mod integrals;
mod protocol;
pub mod quadrature;
mod state;

pub use hamiltonian::{
    dipole_hamiltonian, field_hamiltonian, instantaneous_hamiltonian, integrated_hamiltonian,
    integrated_hamiltonian_between, protocol_hamiltonian_fn,
};
pub use integrals::{
    coupling_integrals_between, coupling_integrals_closed, coupling_integrals_numeric,
    CouplingIntegrals, QUADRATURE_REL_TOL,
};
pub use protocol::{probe_measurement_basis, run_protocol, Propagator, ProtocolRun, DEFAULT_STEPS};
pub use state::{
    analytic_state, asymptotic_entanglement, initial_state, tune_max_entanglement,
    AsymptoticEntanglement, Geometry, TuneFor,
};

use crate::error::{Error, Result};
use crate::quantum_core::{BasisLabel, Subsystem};

pub const PARTICLE1: &str = "particle1";
pub const PARTICLE2: &str = "particle2";

/// Default half-width of the interaction window in units of the transit
/// time `b/v`.
pub const DEFAULT_WINDOW_TRANSITS: f64 = 200.0;

/// `particle1 ⊗ particle2`, ordered `↑↑, ↑↓, ↓↑, ↓↓`.
pub fn spin_basis() -> BasisLabel {
    BasisLabel::new(vec![
        Subsystem::spin_half(PARTICLE1),
        Subsystem::spin_half(PARTICLE2),
    ])
    .expect("distinct subsystem ids")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Dipole coupling constant (energy·length³).
    pub g: f64,
    /// Impact parameter.
    pub b: f64,
    /// Probe speed as a fraction of `c`.
    pub v: f64,
    /// Larmor frequency `ω = −γ₁B_z`.
    pub omega: f64,
    /// Initial precession phase of spin 1.
    pub phi0: f64,
    pub t0: f64,
    pub tf: f64,
}

impl ProtocolParams {
    /// Parameters with the default window `±200·b/v`.
    pub fn new(g: f64, b: f64, v: f64, omega: f64, phi0: f64) -> Result<Self> {
        let transit = if v > 0.0 { b / v } else { f64::NAN };
        let half = DEFAULT_WINDOW_TRANSITS * transit;
        Self::with_window(g, b, v, omega, phi0, -half, half)
    }

    pub fn with_window(
        g: f64,
        b: f64,
        v: f64,
        omega: f64,
        phi0: f64,
        t0: f64,
        tf: f64,
    ) -> Result<Self> {
        let p = Self {
            g,
            b,
            v,
            omega,
            phi0,
            t0,
            tf,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.g, self.b, self.v, self.omega, self.phi0, self.t0, self.tf,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling g must be non-negative, got {}",
                self.g
            )));
        }
        if self.b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "impact parameter b must be positive, got {}",
                self.b
            )));
        }
        if !(self.v > 0.0 && self.v < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "velocity v must lie in (0, 1), got {}",
                self.v
            )));
        }
        if self.tf <= self.t0 {
            return Err(Error::InvalidParameter(format!(
                "window needs t0 < tf, got [{}, {}]",
                self.t0, self.tf
            )));
        }
        Ok(())
    }

    /// `b/v`, the time scale of the fly-by.
    pub fn transit_time(&self) -> f64 {
        self.b / self.v
    }

    /// `θ_∞ = 2g/(b²v)`.
    pub fn theta_inf(&self) -> f64 {
        2.0 * self.g / (self.b * self.b * self.v)
    }
}
