use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qenergy_core::everett_toy::{
    branch_decompose, build_hamiltonian, closed_form_propagator, ToyParams, ENVIRONMENT,
};
use qenergy_core::measurement::{
    born_probabilities, collapse, EnergyLedger, LedgerEvent, MeasurementBasis,
};
use qenergy_core::propagators::{evolve_ordered, evolve_static, HamiltonianFn, TimeGrid};
use qenergy_core::quantum_core::{
    expectation, expm_skew, BasisLabel, Operator, PartialTrace, StateVector, Subsystem,
};
use qenergy_core::spin_protocol::{
    analytic_state, asymptotic_entanglement, coupling_integrals_closed, integrated_hamiltonian,
    ProtocolParams,
};

fn qubits(n: usize) -> BasisLabel {
    BasisLabel::new(
        (0..n)
            .map(|k| Subsystem::spin_half(format!("q{k}")))
            .collect(),
    )
    .unwrap()
}

fn amp() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| C64::new(r, i))
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(amp(), 1 << n)
        .prop_filter("non-null", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(move |v| StateVector::normalized(qubits(n), v).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = Operator> {
    let d = 1 << n;
    prop::collection::vec(amp(), d * d).prop_map(move |v| {
        let m = DMatrix::from_vec(d, d, v) * C64::from(2.0);
        Operator::hermitian(qubits(n), (&m + m.adjoint()) * C64::from(0.5)).unwrap()
    })
}

fn protocol() -> impl Strategy<Value = ProtocolParams> {
    (
        0.05..3.0f64,
        0.3..2.5f64,
        0.05..0.95f64,
        -3.0..3.0f64,
        0.0..7.0f64,
    )
        .prop_map(|(g, b, v, w, phi)| ProtocolParams::new(g, b, v, w, phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_preserves_the_norm(h in hermitian(2), psi in state(2), t in -20.0..20.0f64) {
        let out = expm_skew(&h, t).unwrap().evolve(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_evolution_conserves_energy(h in hermitian(2), psi in state(2)) {
        let e0 = expectation(&h, &psi).unwrap();
        for k in 1..=10 {
            let e = expectation(&h, &evolve_static(&h, 0.7 * k as f64, &psi).unwrap()).unwrap();
            prop_assert!((e - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn reduced_states_have_unit_trace(psi in state(3)) {
        for keep in ["q0", "q1", "q2"] {
            let rho = psi.partial_trace(keep).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_basis_collapse_is_unbiased_on_average(psi in state(1), e1 in -5.0..5.0f64, gap in 0.1..5.0f64) {
        let h = Operator::diagonal(qubits(1), &[e1, e1 + gap]).unwrap();
        let basis = MeasurementBasis::from_observable(&h).unwrap();
        let probs = born_probabilities(&psi, &basis).unwrap();
        let energies = basis.values().unwrap();
        let mean: f64 = probs.iter().zip(energies).map(|(p, e)| p * e).sum();
        prop_assert!((mean - expectation(&h, &psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn collapse_is_idempotent_and_seeded(psi in state(2), seed in any::<u64>(), again in any::<u64>()) {
        let basis = MeasurementBasis::computational(qubits(2)).unwrap();
        let first = collapse(&psi, &basis, seed).unwrap();
        prop_assert_eq!(&first, &collapse(&psi, &basis, seed).unwrap());
        let second = collapse(&first.post_state, &basis, again).unwrap();
        prop_assert_eq!(second.outcome, first.outcome);
        prop_assert!((second.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_components_stay_normalized(p in protocol(), x in -50.0..50.0f64) {
        let psi = analytic_state(&p, x * p.transit_time()).unwrap();
        let n2: f64 = psi.amps().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((n2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn theta_is_nondecreasing(p in protocol(), x in -50.0..50.0f64, dx in 0.0..5.0f64) {
        let tr = p.transit_time();
        let a = coupling_integrals_closed(&p, x * tr).theta;
        let b = coupling_integrals_closed(&p, (x + dx) * tr).theta;
        prop_assert!(b >= a - 1e-15 * p.theta_inf());
    }

    #[test]
    fn integrated_matrix_is_hermitian(p in protocol(), x in -50.0..50.0f64) {
        prop_assert!(integrated_hamiltonian(&p, x * p.transit_time()).hermiticity_defect() == 0.0);
    }

    #[test]
    fn asymptotic_spectrum_ignores_initial_phase(p in protocol()) {
        let base = asymptotic_entanglement(&p);
        for phi0 in [0.0, PI / 3.0, PI, 7.0] {
            let other = asymptotic_entanglement(&ProtocolParams { phi0, ..p });
            prop_assert!((other.k_minus - base.k_minus).abs() < 1e-10);
            prop_assert!((other.k_plus - base.k_plus).abs() < 1e-10);
        }
    }

    #[test]
    fn toy_state_is_periodic_up_to_phases(t in 0.0..10.0f64, lambda in 0.2..3.0f64) {
        let a = C64::from(FRAC_1_SQRT_2);
        let p = ToyParams::new(a, a, 1.0, 3.0, lambda).unwrap();
        let psi = |t: f64| closed_form_propagator(&p, t).unwrap().evolve(&p.initial_state()).unwrap();
        let period = 2.0 * PI / lambda;
        let (now, later) = (psi(t), psi(t + period));
        // level i picks up e^{−iE_i·period}
        for (k, (x, y)) in now.amps().iter().zip(later.amps().iter()).enumerate() {
            let e = if k < 3 { p.e1 } else { p.e2 };
            prop_assert!((x * C64::from_polar(1.0, -e * period) - y).norm() < 1e-10);
        }
    }
}

#[test]
fn toy_branches_are_orthogonal_at_decoherence_time() {
    let a = C64::from(FRAC_1_SQRT_2);
    let p = ToyParams::new(a, a, 1.0, 3.0, 1.0).unwrap();
    let h = build_hamiltonian(&p).unwrap().total();
    let psi = closed_form_propagator(&p, p.decoherence_time())
        .unwrap()
        .evolve(&p.initial_state())
        .unwrap();
    let branches = branch_decompose(&psi, &h, ENVIRONMENT).unwrap();
    assert_eq!(branches.len(), 2);
    assert!(branches[0].state.inner(&branches[1].state).unwrap().norm() < 1e-12);
    let weighted: f64 = branches.iter().map(|b| b.weight * b.energy).sum();
    assert!((weighted - 2.0).abs() < 1e-10);
}

#[test]
fn superposition_collapse_moves_the_energy_both_ways() {
    let basis = qubits(1);
    let h = Operator::diagonal(basis.clone(), &[1.0, 3.0]).unwrap();
    let psi = StateVector::new(basis.clone(), vec![C64::from(0.6), C64::new(0.0, 0.8)]).unwrap();
    let mb = MeasurementBasis::from_observable(&h).unwrap();
    let mut deltas = Vec::new();
    for seed in 0..64 {
        let rec = collapse(&psi, &mb, seed).unwrap();
        let mut ledger = EnergyLedger::new();
        let entry = ledger
            .record(&h, &psi, &rec.post_state, LedgerEvent::Collapse, 0.0)
            .unwrap();
        deltas.push(entry.delta);
    }
    assert!(deltas.iter().all(|d| d.abs() > 0.5));
    assert!(deltas.iter().any(|&d| d > 0.0) && deltas.iter().any(|&d| d < 0.0));
}

#[test]
fn ordered_stepper_is_bitwise_reproducible_and_unitary_over_a_million_steps() {
    let basis = qubits(1);
    let b2 = basis.clone();
    let hfn = HamiltonianFn::new(basis.clone(), move |t: f64| {
        let (s, c) = t.sin_cos();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from(c),
                C64::new(0.3, -s),
                C64::new(0.3, s),
                C64::from(-c),
            ],
        );
        Operator::hermitian(b2.clone(), m).unwrap()
    });
    let psi0 = StateVector::basis_state(basis, 0).unwrap();
    let grid = TimeGrid::new(0.0, 50.0, 1_000_000).unwrap();
    let a = evolve_ordered(&hfn, &grid, &psi0).unwrap();
    assert!(a.norm_drift < 1e-9, "{:e}", a.norm_drift);
    let short = TimeGrid::new(0.0, 5.0, 10_000).unwrap();
    let x = evolve_ordered(&hfn, &short, &psi0).unwrap();
    let y = evolve_ordered(&hfn, &short, &psi0).unwrap();
    assert_eq!(x.state.amps(), y.state.amps());
}
