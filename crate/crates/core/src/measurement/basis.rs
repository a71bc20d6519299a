use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quantum_core::{eigh, BasisLabel, Operator, OperatorKind};
use crate::C64;

const COMPLETENESS_TOL: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Complete set of orthogonal projectors on one or more factors of a larger
/// space. `local` names the factors the projectors act on.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    local: BasisLabel,
    projectors: Vec<Operator>,
    labels: Vec<String>,
    values: Option<Vec<f64>>,
}

impl MeasurementBasis {
    pub fn new(local: BasisLabel, projectors: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != labels.len() {
            return Err(Error::InvalidParameter(
                "measurement needs one label per projector".into(),
            ));
        }
        let d = local.dim();
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for p in &projectors {
            p.basis().ensure_same(&local)?;
            p.require(OperatorKind::Projector)?;
            sum += p.entries();
        }
        let completeness = (sum - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if completeness >= COMPLETENESS_TOL {
            return Err(Error::Consistency(format!(
                "incomplete projector set (defect {completeness:.3e})"
            )));
        }
        for (i, a) in projectors.iter().enumerate() {
            for b in &projectors[i + 1..] {
                let overlap = (a.entries() * b.entries())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if overlap >= ORTHOGONALITY_TOL {
                    return Err(Error::Consistency(format!(
                        "projectors are not orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
        }
        Ok(Self {
            local,
            projectors,
            labels,
            values: None,
        })
    }

    /// Rank-one projectors onto the given (normalized) vectors.
    pub fn from_vectors(
        local: BasisLabel,
        vectors: &[DVector<C64>],
        labels: &[&str],
    ) -> Result<Self> {
        let projectors = vectors
            .iter()
            .map(|v| Operator::projector(local.clone(), v * v.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            local,
            projectors,
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// Standard basis of `local`, labeled by level names.
    pub fn computational(local: BasisLabel) -> Result<Self> {
        let d = local.dim();
        let vectors: Vec<DVector<C64>> = (0..d)
            .map(|i| {
                let mut v = DVector::zeros(d);
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        let labels: Vec<String> = (0..d).map(|i| local.state_label(i)).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        Self::from_vectors(local.clone(), &vectors, &refs)
    }

    /// Eigenspaces of a Hermitian observable, one projector per distinct
    /// eigenvalue (eigenvalues closer than `1e−10·max(1, |λ|)` are merged).
    pub fn from_observable(op: &Operator) -> Result<Self> {
        let e = eigh(op)?;
        let scale = e.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let d = op.dim();
        let mut projectors = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < d {
            let mut j = i + 1;
            while j < d && e.values[j] - e.values[j - 1] <= 1e-10 * scale {
                j += 1;
            }
            let mut p = DMatrix::<C64>::zeros(d, d);
            for k in i..j {
                let v = e.vector(k);
                p += &v * v.adjoint();
            }
            values.push(e.values[i..j].iter().sum::<f64>() / (j - i) as f64);
            projectors.push(Operator::projector(op.basis().clone(), p)?);
            i = j;
        }
        let labels = values.iter().map(|v| format!("{v}")).collect();
        let mut basis = Self::new(op.basis().clone(), projectors, labels)?;
        basis.values = Some(values);
        Ok(basis)
    }

    /// `σ_y` eigenbasis of a spin-1/2 factor, outcomes `+y`, `−y` with
    /// `|±y⟩ = (|up⟩ ± i|down⟩)/√2`.
    pub fn spin_y(local: BasisLabel) -> Result<Self> {
        if local.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: local.dim(),
            });
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)]);
        let minus = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, -s)]);
        Self::from_vectors(local, &[plus, minus], &["+y", "-y"])
    }

    pub fn local(&self) -> &BasisLabel {
        &self.local
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// Eigenvalue attached to each outcome when built from an observable.
    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    /// Projectors lifted to `full` by tensoring with identities on the other
    /// factors, preserving the factor order of `full`.
    pub fn embedded(&self, full: &BasisLabel) -> Result<Vec<Operator>> {
        if *full == self.local {
            return Ok(self.projectors.clone());
        }
        let positions: Vec<usize> = self
            .local
            .factors()
            .iter()
            .map(|f| {
                let pos = full
                    .position(f.id())
                    .ok_or_else(|| Error::UnknownSubsystem(f.id().to_string()))?;
                if full.factors()[pos] != *f {
                    return Err(Error::BasisMismatch(format!(
                        "subsystem `{}` has different levels",
                        f.id()
                    )));
                }
                Ok(pos)
            })
            .collect::<Result<_>>()?;
        let dim = full.dim();
        let multi: Vec<Vec<usize>> = (0..dim).map(|i| full.multi_index(i)).collect();
        let local_index = |m: &[usize]| {
            let sub: Vec<usize> = positions.iter().map(|&p| m[p]).collect();
            self.local.flat_index(&sub)
        };
        self.projectors
            .iter()
            .map(|p| {
                let mut big = DMatrix::<C64>::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        let rest_equal = multi[i]
                            .iter()
                            .zip(&multi[j])
                            .enumerate()
                            .all(|(f, (a, b))| positions.contains(&f) || a == b);
                        if rest_equal {
                            big[(i, j)] =
                                p.entries()[(local_index(&multi[i]), local_index(&multi[j]))];
                        }
                    }
                }
                Operator::projector(full.clone(), big)
            })
            .collect()
    }
}
