use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::max_abs;
use super::{Operator, OperatorKind};
use crate::error::Result;
use crate::C64;

/// Spectral decomposition of a Hermitian operator: ascending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigh {
    pub fn vector(&self, i: usize) -> DVector<C64> {
        self.vectors.column(i).into_owned()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&l| f(l)));
        &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

/// Hermitian eigensolve. Eigenvalues ascend; vectors inside a degenerate
/// cluster are re-orthonormalized in order, and every vector is phased so its
/// largest-magnitude component is real and positive.
pub fn eigh(op: &Operator) -> Result<Eigh> {
    op.require(OperatorKind::Hermitian)?;
    Ok(eigh_matrix(op.entries()))
}

pub(crate) fn eigh_matrix(m: &DMatrix<C64>) -> Eigh {
    let n = m.nrows();
    // symmetrize so round-off in the input never leaks into the solver
    let sym = (m + m.adjoint()).map(|z| z * 0.5);
    let se = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }

    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let cluster_tol = 1e-10 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        for j in start..end {
            let mut v = vectors.column(j).into_owned();
            for k in start..j {
                let u = vectors.column(k).into_owned();
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
            let norm = v.norm();
            vectors.set_column(j, &v.unscale(norm));
        }
        start = end;
    }

    for j in 0..n {
        let col = vectors.column(j).into_owned();
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let anchor = col
            .iter()
            .find(|z| z.norm() >= peak * (1.0 - 1e-10))
            .copied()
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = anchor.conj() / anchor.norm();
        vectors.set_column(j, &(col * phase));
    }

    Eigh { values, vectors }
}

/// `exp(−i·h·t)` built from the eigendecomposition of `h`.
pub fn expm_skew(h: &Operator, t: f64) -> Result<Operator> {
    h.require(OperatorKind::Hermitian)?;
    let u = expm_skew_matrix(h.entries(), t);
    Operator::unitary(h.basis().clone(), u)
}

pub(crate) fn expm_skew_matrix(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    if max_abs(h) == 0.0 || t == 0.0 {
        let n = h.nrows();
        return DMatrix::identity(n, n);
    }
    eigh_matrix(h).reconstruct_with(|l| C64::from_polar(1.0, -l * t))
}
