use std::fmt;

use crate::error::{Error, Result};

/// One tensor factor of a Hilbert space: an identifier and its level names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    id: String,
    levels: Vec<String>,
}

impl Subsystem {
    pub fn new<S: Into<String>>(id: S, levels: &[&str]) -> Self {
        assert!(!levels.is_empty(), "a subsystem needs at least one level");
        Self {
            id: id.into(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// A spin-1/2 factor with levels `up`, `down` (σ_z = +1, −1).
    pub fn spin_half<S: Into<String>>(id: S) -> Self {
        Self::new(id, &["up", "down"])
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }
}

/// Ordered list of tensor factors. Basis states are ordered lexicographically
/// with the first factor most significant, so two spins enumerate as
/// `up,up`, `up,down`, `down,up`, `down,down`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    factors: Vec<Subsystem>,
}

impl BasisLabel {
    pub fn new(factors: Vec<Subsystem>) -> Result<Self> {
        for (i, a) in factors.iter().enumerate() {
            if factors[..i].iter().any(|b| b.id == a.id) {
                return Err(Error::SubsystemClash(a.id.clone()));
            }
        }
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty basis".into()));
        }
        Ok(Self { factors })
    }

    pub fn single(subsystem: Subsystem) -> Self {
        Self {
            factors: vec![subsystem],
        }
    }

    pub fn factors(&self) -> &[Subsystem] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Subsystem::dim).product()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.id == id)
    }

    pub fn subsystem(&self, id: &str) -> Result<&Subsystem> {
        self.factors
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::UnknownSubsystem(id.to_string()))
    }

    /// Concatenation `self ⊗ other`; subsystem ids must be disjoint.
    pub fn product(&self, other: &BasisLabel) -> Result<BasisLabel> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        BasisLabel::new(factors)
    }

    /// Per-factor level indices of the flat index `index`.
    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.dim();
            index /= f.dim();
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.factors.len());
        multi
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, f)| acc * f.dim() + i)
    }

    /// Human-readable label of a basis state, e.g. `up,down`.
    pub fn state_label(&self, index: usize) -> String {
        self.multi_index(index)
            .iter()
            .zip(&self.factors)
            .map(|(&i, f)| f.levels[i].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub(crate) fn ensure_same(&self, other: &BasisLabel) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|s| format!("{}[{}]", s.id, s.dim()))
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}
