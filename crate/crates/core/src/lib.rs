//! Energy expectation-value bookkeeping for small closed quantum systems.
//!
//! The crate tracks `⟨ψ|H|ψ⟩` through unitary evolution, decoherence
//! branching and projective collapse, for two concrete models:
//!
//! * [`everett_toy`]: a two-level system coupled to a three-level
//!   environment whose interaction records the system state in orthogonal
//!   environment pointer states;
//! * [`spin_protocol`]: a trapped spin-1/2 precessing in a magnetic field,
//!   entangled with a passing probe spin through the dipole–dipole
//!   interaction, after which the probe is measured.
//!
//! Every closed-form result has an independent numerical route alongside it
//! (matrix exponentials, quadrature, time-ordered stepping) so the two can
//! be cross-checked.

pub mod error;
pub mod everett_toy;
pub mod measurement;
pub mod propagators;
pub mod quantum_core;
pub mod spin_protocol;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
