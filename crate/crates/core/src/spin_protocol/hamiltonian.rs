use nalgebra::DMatrix;

use super::integrals::{coupling_integrals_between, coupling_integrals_closed, CouplingIntegrals};
use super::{spin_basis, ProtocolParams};
use crate::propagators::HamiltonianFn;
use crate::quantum_core::{Operator, OperatorKind};
use crate::C64;

fn spin_operators() -> [DMatrix<C64>; 3] {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    [
        DMatrix::from_row_slice(2, 2, &[z, h, h, z]),
        DMatrix::from_row_slice(2, 2, &[z, -ih, ih, z]),
        DMatrix::from_row_slice(2, 2, &[h, z, z, -h]),
    ]
}

/// `ω S₁ᶻ ⊗ 1₂`, the Hamiltonian once the spins are far apart.
pub fn field_hamiltonian(p: &ProtocolParams) -> Operator {
    let w = 0.5 * p.omega;
    Operator::diagonal(spin_basis(), &[w, w, -w, -w]).expect("real diagonal")
}

/// `(g/r³)[S₁·S₂ − 3(S₁·r̂)(S₂·r̂)]` with spin 2 at `(vt, b, 0)`.
pub fn dipole_hamiltonian(p: &ProtocolParams, t: f64) -> Operator {
    let r2 = p.b * p.b + p.v * p.v * t * t;
    let r = r2.sqrt();
    let strength = p.g / (r2 * r);
    let unit = [p.v * t / r, p.b / r, 0.0];
    let s = spin_operators();
    let id = DMatrix::<C64>::identity(2, 2);
    let s1: Vec<DMatrix<C64>> = s.iter().map(|m| m.kronecker(&id)).collect();
    let s2: Vec<DMatrix<C64>> = s.iter().map(|m| id.kronecker(m)).collect();

    let mut dot = DMatrix::<C64>::zeros(4, 4);
    let mut n1 = DMatrix::<C64>::zeros(4, 4);
    let mut n2 = DMatrix::<C64>::zeros(4, 4);
    for a in 0..3 {
        dot += &s1[a] * &s2[a];
        n1 += &s1[a] * C64::from(unit[a]);
        n2 += &s2[a] * C64::from(unit[a]);
    }
    let m = (dot - n1 * n2 * C64::from(3.0)) * C64::from(strength);
    // built from commuting Hermitian factors, so Hermitian up to round-off
    Operator::trusted(
        spin_basis(),
        (&m + m.adjoint()) * C64::from(0.5),
        OperatorKind::Hermitian,
    )
}

/// Full `H(t) = ω S₁ᶻ ⊗ 1₂ + (g/r³)[S₁·S₂ − 3(S₁·r̂)(S₂·r̂)]`.
pub fn instantaneous_hamiltonian(p: &ProtocolParams, t: f64) -> Operator {
    field_hamiltonian(p)
        .add(&dipole_hamiltonian(p, t))
        .expect("same basis")
}

fn integrated_matrix(c: &CouplingIntegrals) -> Operator {
    let (th, om) = (c.theta, c.omega_t);
    let r = |x: f64| C64::new(x / 4.0, 0.0);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        r(th + 2.0 * om), z,                z,                c.xi.conj() / 4.0,
        z,                r(-th + 2.0 * om), r(-th),          z,
        z,                r(-th),           r(-th - 2.0 * om), z,
        c.xi / 4.0,       z,                z,                r(th - 2.0 * om),
    ]);
    Operator::trusted(spin_basis(), m, OperatorKind::Hermitian)
}

/// `∫ H dt′` in the `↑↑, ↑↓, ↓↑, ↓↓` basis: `θ`, `ξ` from `−∞`, `Ω` from `t₀`.
pub fn integrated_hamiltonian(p: &ProtocolParams, t: f64) -> Operator {
    integrated_matrix(&coupling_integrals_closed(p, t))
}

/// `∫_{t_start}^{t} H dt′` exactly, all three couplings over the same interval.
pub fn integrated_hamiltonian_between(p: &ProtocolParams, t_start: f64, t: f64) -> Operator {
    integrated_matrix(&coupling_integrals_between(p, t_start, t))
}

/// `t ↦ H(t)` for the propagators.
pub fn protocol_hamiltonian_fn(p: &ProtocolParams) -> HamiltonianFn<'static> {
    let p = *p;
    HamiltonianFn::new(spin_basis(), move |t| instantaneous_hamiltonian(&p, t))
}
