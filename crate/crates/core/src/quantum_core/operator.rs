use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::{BasisLabel, StateVector, HERMITIAN_TOL, PROJECTOR_TOL, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    Projector,
    General,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Hermitian => "hermitian",
            OperatorKind::Unitary => "unitary",
            OperatorKind::Projector => "a projector",
            OperatorKind::General => "general",
        })
    }
}

/// Square complex matrix on a labeled basis, tagged with the role it plays.
/// The tag is checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: BasisLabel,
    entries: DMatrix<C64>,
    kind: OperatorKind,
}

impl Operator {
    pub fn new(basis: BasisLabel, entries: DMatrix<C64>, kind: OperatorKind) -> Result<Self> {
        let dim = basis.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let op = Self {
            basis,
            entries,
            kind,
        };
        op.check_kind(kind)?;
        Ok(op)
    }

    pub fn hermitian(basis: BasisLabel, entries: DMatrix<C64>) -> Result<Self> {
        Self::new(basis, entries, OperatorKind::Hermitian)
    }

    pub fn unitary(basis: BasisLabel, entries: DMatrix<C64>) -> Result<Self> {
        Self::new(basis, entries, OperatorKind::Unitary)
    }

    pub fn projector(basis: BasisLabel, entries: DMatrix<C64>) -> Result<Self> {
        Self::new(basis, entries, OperatorKind::Projector)
    }

    pub fn general(basis: BasisLabel, entries: DMatrix<C64>) -> Result<Self> {
        Self::new(basis, entries, OperatorKind::General)
    }

    /// Real diagonal operator, Hermitian by construction.
    pub fn diagonal(basis: BasisLabel, diag: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| C64::new(d, 0.0)));
        if v.len() != basis.dim() {
            return Err(Error::Dimension {
                expected: basis.dim(),
                got: v.len(),
            });
        }
        Self::hermitian(basis, DMatrix::from_diagonal(&v))
    }

    pub fn identity(basis: BasisLabel) -> Self {
        let d = basis.dim();
        Self {
            basis,
            entries: DMatrix::identity(d, d),
            kind: OperatorKind::Unitary,
        }
    }

    pub fn zero(basis: BasisLabel) -> Self {
        let d = basis.dim();
        Self {
            basis,
            entries: DMatrix::zeros(d, d),
            kind: OperatorKind::Hermitian,
        }
    }

    /// Skips the kind check. Only for matrices whose kind follows from how
    /// they were assembled.
    pub(crate) fn trusted(basis: BasisLabel, entries: DMatrix<C64>, kind: OperatorKind) -> Self {
        debug_assert_eq!(entries.nrows(), basis.dim());
        Self {
            basis,
            entries,
            kind,
        }
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs().max(1.0);
        max_abs(&(&self.entries - self.entries.adjoint())) / scale
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - DMatrix::<C64>::identity(d, d)))
    }

    pub fn idempotence_defect(&self) -> f64 {
        max_abs(&(&self.entries * &self.entries - &self.entries))
    }

    fn check_kind(&self, kind: OperatorKind) -> Result<()> {
        let defect = match kind {
            OperatorKind::General => return Ok(()),
            OperatorKind::Hermitian => (self.hermiticity_defect(), HERMITIAN_TOL),
            OperatorKind::Unitary => (self.unitarity_defect(), UNITARY_TOL),
            OperatorKind::Projector => {
                let h = self.hermiticity_defect();
                if h >= HERMITIAN_TOL {
                    (h, HERMITIAN_TOL)
                } else {
                    (self.idempotence_defect(), PROJECTOR_TOL)
                }
            }
        };
        if defect.0 < defect.1 {
            Ok(())
        } else {
            Err(Error::Contract {
                kind: match kind {
                    OperatorKind::Hermitian => "hermitian",
                    OperatorKind::Unitary => "unitary",
                    OperatorKind::Projector => "a projector",
                    OperatorKind::General => unreachable!(),
                },
                defect: defect.0,
            })
        }
    }

    /// Re-tags the operator, validating the new kind.
    pub fn with_kind(self, kind: OperatorKind) -> Result<Self> {
        self.check_kind(kind)?;
        Ok(Self { kind, ..self })
    }

    pub fn require(&self, kind: OperatorKind) -> Result<()> {
        self.check_kind(kind)
    }

    pub fn dagger(&self) -> Operator {
        Self {
            basis: self.basis.clone(),
            entries: self.entries.adjoint(),
            kind: self.kind,
        }
    }

    /// Matrix product `self · rhs`, tagged general unless both are unitary.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.basis.ensure_same(&rhs.basis)?;
        let kind = if self.kind == OperatorKind::Unitary && rhs.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(Self::trusted(
            self.basis.clone(),
            &self.entries * &rhs.entries,
            kind,
        ))
    }

    /// Sum of two operators; Hermitian if both are.
    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.basis.ensure_same(&rhs.basis)?;
        let kind = if self.is_selfadjoint() && rhs.is_selfadjoint() {
            OperatorKind::Hermitian
        } else {
            OperatorKind::General
        };
        Ok(Self::trusted(
            self.basis.clone(),
            &self.entries + &rhs.entries,
            kind,
        ))
    }

    /// Multiplies by a real scalar; Hermitian operators stay Hermitian.
    pub fn scale(&self, s: f64) -> Operator {
        let kind = if self.is_selfadjoint() {
            OperatorKind::Hermitian
        } else {
            OperatorKind::General
        };
        Self::trusted(self.basis.clone(), self.entries.map(|z| z * s), kind)
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.basis.ensure_same(&rhs.basis)?;
        let c = &self.entries * &rhs.entries - &rhs.entries * &self.entries;
        Ok(Self::trusted(self.basis.clone(), c, OperatorKind::General))
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.basis.ensure_same(&other.basis)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }

    /// `A|ψ⟩` without renormalization.
    pub fn apply_raw(&self, psi: &StateVector) -> Result<DVector<C64>> {
        self.basis.ensure_same(psi.basis())?;
        Ok(&self.entries * psi.amps())
    }

    /// `U|ψ⟩` for a unitary `U`.
    pub fn evolve(&self, psi: &StateVector) -> Result<StateVector> {
        if self.kind != OperatorKind::Unitary {
            self.check_kind(OperatorKind::Unitary)?;
        }
        let out = self.apply_raw(psi)?;
        Ok(StateVector::from_evolution(self.basis.clone(), out))
    }

    fn is_selfadjoint(&self) -> bool {
        matches!(self.kind, OperatorKind::Hermitian | OperatorKind::Projector)
    }
}

/// `⟨ψ|A|ψ⟩` for a Hermitian `A`. The imaginary residue is checked and dropped.
pub fn expectation(op: &Operator, psi: &StateVector) -> Result<f64> {
    op.require(OperatorKind::Hermitian)?;
    let z = psi.amps().dotc(&op.apply_raw(psi)?);
    let scale = op.max_abs().max(1.0);
    if z.im.abs() > 1e-12 * scale {
        return Err(Error::Consistency(format!(
            "expectation value has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::Subsystem;

    fn qubit() -> BasisLabel {
        BasisLabel::single(Subsystem::spin_half("q"))
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            Operator::hermitian(qubit(), m.clone()),
            Err(Error::Contract {
                kind: "hermitian",
                ..
            })
        ));
        let general = Operator::general(qubit(), m).unwrap();
        let psi = StateVector::basis_state(qubit(), 0).unwrap();
        assert!(expectation(&general, &psi).is_err());
    }

    #[test]
    fn identity_expectation_is_one() {
        let psi = StateVector::normalized(qubit(), vec![c(0.3, -0.2), c(0.1, 0.9)]).unwrap();
        let e = expectation(&Operator::identity(qubit()), &psi).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_is_hermitian_and_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let h = Operator::hermitian(qubit(), m.clone()).unwrap();
        assert!(h.clone().with_kind(OperatorKind::Unitary).is_ok());
        assert!(h.with_kind(OperatorKind::Projector).is_err());
    }

    #[test]
    fn projector_checks_idempotence() {
        let p = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.5, 0.), c(0.5, 0.), c(0.5, 0.)]);
        assert!(Operator::projector(qubit(), p.clone()).is_ok());
        assert!(Operator::projector(qubit(), p * c(2.0, 0.0)).is_err());
    }
}
