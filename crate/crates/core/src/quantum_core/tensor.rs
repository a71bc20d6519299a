use super::{Operator, OperatorKind, StateVector};
use crate::error::Result;

/// Kronecker product in the fixed lexicographic factor order: the left
/// operand's factors come first.
pub trait TensorProduct: Sized {
    fn tensor(&self, rhs: &Self) -> Result<Self>;
}

impl TensorProduct for StateVector {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        let basis = self.basis().product(rhs.basis())?;
        let amps = self.amps().kronecker(rhs.amps());
        Ok(StateVector::from_evolution(basis, amps))
    }
}

impl TensorProduct for Operator {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        let basis = self.basis().product(rhs.basis())?;
        let entries = self.entries().kronecker(rhs.entries());
        let kind = match (self.kind(), rhs.kind()) {
            (a, b) if a == b => a,
            (OperatorKind::Projector, OperatorKind::Hermitian)
            | (OperatorKind::Hermitian, OperatorKind::Projector) => OperatorKind::Hermitian,
            _ => OperatorKind::General,
        };
        Ok(Operator::trusted(basis, entries, kind))
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}
