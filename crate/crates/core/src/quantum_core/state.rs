use nalgebra::DVector;

use super::{BasisLabel, NORM_TOL};
use crate::error::{Error, Result};
use crate::C64;

/// Normalized pure state over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: BasisLabel,
    amps: DVector<C64>,
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(basis: BasisLabel, amps: Vec<C64>) -> Result<Self> {
        let amps = DVector::from_vec(amps);
        check_shape(&basis, &amps)?;
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { basis, amps })
    }

    /// Builds a state by rescaling arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(basis: BasisLabel, amps: Vec<C64>) -> Result<Self> {
        let amps = DVector::from_vec(amps);
        Self::normalized_vector(basis, amps)
    }

    pub(crate) fn normalized_vector(basis: BasisLabel, amps: DVector<C64>) -> Result<Self> {
        check_shape(&basis, &amps)?;
        let n = amps.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            basis,
            amps: amps.unscale(n),
        })
    }

    /// Wraps the output of a unitary map without re-checking the norm; the
    /// caller reports any drift.
    pub(crate) fn from_evolution(basis: BasisLabel, amps: DVector<C64>) -> Self {
        debug_assert_eq!(basis.dim(), amps.len());
        Self { basis, amps }
    }

    pub fn basis_state(basis: BasisLabel, index: usize) -> Result<Self> {
        let dim = basis.dim();
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                got: index + 1,
            });
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.basis.ensure_same(&other.basis)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Euclidean distance `‖self − other‖`, phase-sensitive.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.basis.ensure_same(&other.basis)?;
        Ok((&self.amps - &other.amps).norm())
    }

    /// Largest entrywise deviation `max_k |a_k − b_k|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.basis.ensure_same(&other.basis)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Rotates the global phase so the first amplitude with magnitude above
    /// `1e-14` is real and positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-14) {
            let phase = first.conj() / first.norm();
            self.amps *= phase;
        }
        self
    }
}

fn check_shape(basis: &BasisLabel, amps: &DVector<C64>) -> Result<()> {
    if amps.len() != basis.dim() {
        return Err(Error::Dimension {
            expected: basis.dim(),
            got: amps.len(),
        });
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}
