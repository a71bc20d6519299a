use nalgebra::DMatrix;

use super::operator::max_abs;
use super::{eigh_matrix, BasisLabel, StateVector, EIGEN_CLIP};
use crate::error::{Error, Result};
use crate::C64;

const DENSITY_TOL: f64 = 1e-12;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: BasisLabel,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(basis: BasisLabel, entries: DMatrix<C64>) -> Result<Self> {
        let d = basis.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                got: entries.nrows(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let herm = max_abs(&(&entries - entries.adjoint()));
        if herm >= DENSITY_TOL {
            return Err(Error::Contract {
                kind: "hermitian",
                defect: herm,
            });
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() >= DENSITY_TOL || tr.im.abs() >= DENSITY_TOL {
            return Err(Error::Consistency(format!("density matrix trace {tr}")));
        }
        let min = eigh_matrix(&entries).values[0];
        if min < -EIGEN_CLIP {
            return Err(Error::Consistency(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { basis, entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            basis: psi.basis().clone(),
            entries: psi.amps() * psi.amps().adjoint(),
        }
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Ascending eigenvalues, with round-off negatives in `[−1e−12, 0)`
    /// clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh_matrix(&self.entries)
            .values
            .into_iter()
            .map(|l| {
                if (-EIGEN_CLIP..0.0).contains(&l) {
                    0.0
                } else {
                    l
                }
            })
            .collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }
}

/// Reduction onto a single subsystem.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &str) -> Result<DensityMatrix>;
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &str) -> Result<DensityMatrix> {
        reduce(&self.basis, keep, |i, j| self.entries[(i, j)])
    }
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &str) -> Result<DensityMatrix> {
        let amps = self.amps();
        reduce(self.basis(), keep, |i, j| amps[i] * amps[j].conj())
    }
}

pub fn partial_trace<T: PartialTrace>(input: &T, keep: &str) -> Result<DensityMatrix> {
    input.partial_trace(keep)
}

/// Sums `element(I, J)` over all flat index pairs that agree outside the
/// kept factor.
fn reduce(
    basis: &BasisLabel,
    keep: &str,
    element: impl Fn(usize, usize) -> C64,
) -> Result<DensityMatrix> {
    let pos = basis
        .position(keep)
        .ok_or_else(|| Error::UnknownSubsystem(keep.to_string()))?;
    let kept = basis.factors()[pos].clone();
    let dk = kept.dim();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    let dim = basis.dim();
    let multi: Vec<Vec<usize>> = (0..dim).map(|i| basis.multi_index(i)).collect();
    for i in 0..dim {
        for j in 0..dim {
            let same_rest = multi[i]
                .iter()
                .zip(&multi[j])
                .enumerate()
                .all(|(f, (a, b))| f == pos || a == b);
            if same_rest {
                out[(multi[i][pos], multi[j][pos])] += element(i, j);
            }
        }
    }
    Ok(DensityMatrix {
        basis: BasisLabel::single(kept),
        entries: out,
    })
}
