//! Dense complex linear algebra over small labeled Hilbert spaces.

mod basis;
mod density;
mod linalg;
mod operator;
mod state;
mod tensor;

pub use basis::{BasisLabel, Subsystem};
pub use density::{partial_trace, DensityMatrix, PartialTrace};
pub use linalg::{eigh, expm_skew, Eigh};
pub use operator::{expectation, Operator, OperatorKind};
pub use state::StateVector;
pub use tensor::{tensor_product, TensorProduct};

pub(crate) use linalg::{eigh_matrix, expm_skew_matrix};

/// Normalization tolerance for constructed states.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity tolerance, applied to `max|A - A†|` relative to `max(1, max|A|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity tolerance on `max|U†U - 1|`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Idempotence tolerance on `max|P² - P|`.
pub const PROJECTOR_TOL: f64 = 1e-12;
/// Reduced-density eigenvalues in `[-EIGEN_CLIP, 0)` are clamped to zero.
pub const EIGEN_CLIP: f64 = 1e-12;
