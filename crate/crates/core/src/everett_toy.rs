//! Two-level system coupled to a three-level environment.
//!
//! The system levels `|1⟩_s`, `|2⟩_s` carry energies `E₁`, `E₂`. The
//! interaction rotates the environment out of its ready state `|0⟩_e` into
//! `|i⟩_e` conditioned on the system level `i`, at rate `λ`. At
//! `t* = π/(2λ)` the environment pointer states are orthogonal and the global
//! state splits into two branches whose energies are `E₁` and `E₂`, although
//! the global `⟨H⟩` never changes. The environment has no Hamiltonian of its
//! own, so the energy attributed to it is identically zero.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measurement::{BranchTag, EnergyLedger, LedgerEvent};
use crate::quantum_core::{
    eigh, expectation, BasisLabel, Operator, OperatorKind, StateVector, Subsystem,
};
use crate::C64;

pub const SYSTEM: &str = "system";
pub const ENVIRONMENT: &str = "environment";

/// Branches lighter than this are round-off ghosts and are dropped.
pub const BRANCH_WEIGHT_FLOOR: f64 = 1e-14;
/// Spectral weights below this are dropped.
pub const SPECTRAL_WEIGHT_FLOOR: f64 = 1e-14;

/// `system ⊗ environment` with levels `{1,2} × {0,1,2}`.
pub fn toy_basis() -> BasisLabel {
    BasisLabel::new(vec![
        Subsystem::new(SYSTEM, &["1", "2"]),
        Subsystem::new(ENVIRONMENT, &["0", "1", "2"]),
    ])
    .expect("distinct subsystem ids")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyParams {
    pub alpha: C64,
    pub beta: C64,
    pub e1: f64,
    pub e2: f64,
    pub lambda: f64,
}

impl ToyParams {
    pub fn new(alpha: C64, beta: C64, e1: f64, e2: f64, lambda: f64) -> Result<Self> {
        let finite = [alpha.re, alpha.im, beta.re, beta.im, e1, e2, lambda]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        let n2 = alpha.norm_sqr() + beta.norm_sqr();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n2));
        }
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            e1,
            e2,
            lambda,
        })
    }

    /// `t* = π/(2λ)`, when the pointer states become orthogonal.
    pub fn decoherence_time(&self) -> f64 {
        FRAC_PI_2 / self.lambda
    }

    /// `|α|²E₁ + |β|²E₂`.
    pub fn mean_energy(&self) -> f64 {
        self.alpha.norm_sqr() * self.e1 + self.beta.norm_sqr() * self.e2
    }

    /// `(α|1⟩_s + β|2⟩_s) ⊗ |0⟩_e`.
    pub fn initial_state(&self) -> StateVector {
        let z = C64::new(0.0, 0.0);
        StateVector::new(toy_basis(), vec![self.alpha, z, z, self.beta, z, z])
            .expect("normalization checked in ToyParams::new")
    }
}

#[derive(Debug, Clone)]
pub struct ToyHamiltonian {
    pub h_self: Operator,
    pub h_int: Operator,
}

impl ToyHamiltonian {
    pub fn total(&self) -> Operator {
        self.h_self.add(&self.h_int).expect("same basis")
    }
}

/// `H_self = (E₁|1⟩⟨1| + E₂|2⟩⟨2|) ⊗ 1_e` and
/// `H_int = −iλ Σ_i |i⟩⟨i|_s ⊗ (|0⟩⟨i| − |i⟩⟨0|)_e`.
pub fn build_hamiltonian(p: &ToyParams) -> Result<ToyHamiltonian> {
    let basis = toy_basis();
    let h_self = Operator::diagonal(basis.clone(), &[p.e1, p.e1, p.e1, p.e2, p.e2, p.e2])?;
    let mut m = DMatrix::<C64>::zeros(6, 6);
    for (s, pointer) in [(0usize, 1usize), (1, 2)] {
        let ready = basis.flat_index(&[s, 0]);
        let marked = basis.flat_index(&[s, pointer]);
        m[(ready, marked)] = C64::new(0.0, -p.lambda);
        m[(marked, ready)] = C64::new(0.0, p.lambda);
    }
    let h_int = Operator::hermitian(basis, m)?;
    let comm = h_self.commutator(&h_int)?.max_abs();
    if comm > 1e-12 {
        return Err(Error::Consistency(format!(
            "self and interaction terms fail to commute ({comm:e})"
        )));
    }
    Ok(ToyHamiltonian { h_self, h_int })
}

/// `U(t) = e^{−iE₁t}|1⟩⟨1| ⊗ R₁(λt) + e^{−iE₂t}|2⟩⟨2| ⊗ R₂(λt)`, where `R_i`
/// rotates the `(|0⟩_e, |i⟩_e)` plane by `λt`.
pub fn closed_form_propagator(p: &ToyParams, t: f64) -> Result<Operator> {
    let basis = toy_basis();
    let (sin, cos) = (p.lambda * t).sin_cos();
    let mut u = DMatrix::<C64>::zeros(6, 6);
    for (s, energy, pointer, idle) in [(0usize, p.e1, 1usize, 2usize), (1, p.e2, 2, 1)] {
        let phase = C64::from_polar(1.0, -energy * t);
        let at = |e: usize| basis.flat_index(&[s, e]);
        u[(at(0), at(0))] = phase * cos;
        u[(at(0), at(pointer))] = -phase * sin;
        u[(at(pointer), at(0))] = phase * sin;
        u[(at(pointer), at(pointer))] = phase * cos;
        u[(at(idle), at(idle))] = phase;
    }
    Operator::unitary(basis, u)
}

/// One decohered branch, keyed on an environment pointer state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    /// Environment level naming the branch.
    pub label: String,
    /// Norm of the conditional system state (real, non-negative).
    pub amplitude: C64,
    /// Normalized `conditional system state ⊗ |i⟩_e`.
    pub state: StateVector,
    /// `⟨H⟩` in the normalized branch state.
    pub energy: f64,
    pub weight: f64,
}

/// Splits `psi` along the basis states of `env_subsystem`. Branches with
/// weight below [`BRANCH_WEIGHT_FLOOR`] are omitted.
pub fn branch_decompose(
    psi: &StateVector,
    h: &Operator,
    env_subsystem: &str,
) -> Result<Vec<BranchRecord>> {
    let basis = psi.basis();
    let pos = basis
        .position(env_subsystem)
        .ok_or_else(|| Error::UnknownSubsystem(env_subsystem.to_string()))?;
    let env = &basis.factors()[pos];
    let mut out = Vec::new();
    for level in 0..env.dim() {
        let conditional = DVector::from_iterator(
            psi.dim(),
            (0..psi.dim()).map(|i| {
                if basis.multi_index(i)[pos] == level {
                    psi.amp(i)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        );
        let weight = conditional.norm_squared();
        if weight < BRANCH_WEIGHT_FLOOR {
            continue;
        }
        let state = StateVector::normalized_vector(basis.clone(), conditional)?;
        let energy = expectation(h, &state)?;
        out.push(BranchRecord {
            label: env.levels()[level].clone(),
            amplitude: C64::new(weight.sqrt(), 0.0),
            state,
            energy,
            weight,
        });
    }
    Ok(out)
}

/// Energy audit of the toy model at the given times.
///
/// For each time the ledger gets one `evolve` entry for the global state
/// (parts `self`, `interaction`, `environment`) followed by one `branch`
/// entry per branch, whose delta is the branch energy minus the global one.
/// Fails if `⟨H_int⟩ ≠ 0` (1e−12), if the global energy drifts from
/// `|α|²E₁ + |β|²E₂` (1e−10), or if at `t*` the weighted branch energies do
/// not add up to the global energy (1e−10).
pub fn branch_energy_audit(p: &ToyParams, t_samples: &[f64]) -> Result<EnergyLedger> {
    let ham = build_hamiltonian(p)?;
    let h = ham.total();
    let env_energy = Operator::zero(toy_basis());
    let parts = [
        ("self", &ham.h_self),
        ("interaction", &ham.h_int),
        ("environment", &env_energy),
    ];
    let psi0 = p.initial_state();
    let expected = p.mean_energy();
    let t_star = p.decoherence_time();

    let mut ledger = EnergyLedger::new();
    let mut prev = psi0.clone();
    for &t in t_samples {
        let psi = closed_form_propagator(p, t)?.evolve(&psi0)?;
        let entry = ledger.record_parts(&h, &prev, &psi, LedgerEvent::Evolve, t, &parts, None)?;
        let global = entry.total_energy;
        let int = entry.subsystem_energies["interaction"];
        if int.abs() > 1e-12 {
            return Err(Error::Consistency(format!("⟨H_int⟩ = {int:e} at t = {t}")));
        }
        if (global - expected).abs() > 1e-10 {
            return Err(Error::Consistency(format!(
                "global energy {global} differs from {expected} at t = {t}"
            )));
        }
        let branches = branch_decompose(&psi, &h, ENVIRONMENT)?;
        let weighted: f64 = branches.iter().map(|b| b.weight * b.energy).sum();
        if (t - t_star).abs() < 1e-12 && (weighted - global).abs() > 1e-10 {
            return Err(Error::Consistency(format!(
                "weighted branch energy {weighted} differs from global {global} at t*"
            )));
        }
        for b in &branches {
            let tag = BranchTag {
                label: b.label.clone(),
                weight: b.weight,
            };
            ledger.record_parts(
                &h,
                &psi,
                &b.state,
                LedgerEvent::Branch,
                t,
                &parts,
                Some(tag),
            )?;
        }
        prev = psi;
    }
    Ok(ledger)
}

/// `(E_n, Σ|⟨E_n|ψ⟩|²)` over the distinct eigenvalues of `h`, merging
/// degenerate eigenvectors so the weights do not depend on the eigenbasis
/// chosen inside a degenerate subspace.
pub fn spectral_support(h: &Operator, psi: &StateVector) -> Result<Vec<(f64, f64)>> {
    h.require(OperatorKind::Hermitian)?;
    h.basis().ensure_same(psi.basis())?;
    let e = eigh(h)?;
    let scale = e.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &value) in e.values.iter().enumerate() {
        let w = e.vector(i).dotc(psi.amps()).norm_sqr();
        match out.last_mut() {
            Some((v, acc)) if value - *v <= 1e-10 * scale => *acc += w,
            _ => out.push((value, w)),
        }
    }
    out.retain(|&(_, w)| w >= SPECTRAL_WEIGHT_FLOOR);
    Ok(out)
}

/// Spectral support of one branch state.
pub fn branch_spectral_support(h: &Operator, branch: &BranchRecord) -> Result<Vec<(f64, f64)>> {
    spectral_support(h, &branch.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::expm_skew;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn even() -> ToyParams {
        ToyParams::new(c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.), 1.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(
            ToyParams::new(c(2., 0.), c(0., 0.), 1., 2., 1.),
            Err(Error::NotNormalized(_))
        ));
        assert!(ToyParams::new(c(1., 0.), c(0., 0.), 1., 2., 0.).is_err());
    }

    #[test]
    fn zero_energies_give_zero_self_term() {
        let p = ToyParams::new(c(1., 0.), c(0., 0.), 0., 0., 1.).unwrap();
        assert_eq!(build_hamiltonian(&p).unwrap().h_self.max_abs(), 0.0);
    }

    #[test]
    fn interaction_entries_sit_where_expected() {
        let ham = build_hamiltonian(&even()).unwrap();
        let m = ham.h_int.entries();
        // |1,0⟩⟨1,1| carries −iλ and |2,0⟩⟨2,2| likewise
        assert_eq!(m[(0, 1)], c(0., -1.));
        assert_eq!(m[(1, 0)], c(0., 1.));
        assert_eq!(m[(3, 5)], c(0., -1.));
        assert_eq!(m[(5, 3)], c(0., 1.));
        let nonzero = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
        assert_eq!(ham.h_self.commutator(&ham.h_int).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn closed_form_matches_numeric_exponential() {
        for p in [
            even(),
            ToyParams::new(c(0.6, 0.), c(0., 0.8), -0.7, 2.2, 0.35).unwrap(),
        ] {
            let h = build_hamiltonian(&p).unwrap().total();
            for k in 0..100 {
                let t = 4.0 * PI / p.lambda * k as f64 / 99.0;
                let closed = closed_form_propagator(&p, t).unwrap();
                let numeric = expm_skew(&h, t).unwrap();
                assert!(closed.max_abs_diff(&numeric).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let u = closed_form_propagator(&even(), 0.0).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(toy_basis())).unwrap() < 1e-15);
    }

    #[test]
    fn evolved_state_at_t_star_is_branched() {
        let p = ToyParams::new(c(0.6, 0.), c(0., 0.8), 1.0, 3.0, 2.0).unwrap();
        let ts = p.decoherence_time();
        let psi = closed_form_propagator(&p, ts)
            .unwrap()
            .evolve(&p.initial_state())
            .unwrap();
        let expect = [
            (1usize, p.alpha * C64::from_polar(1.0, -p.e1 * ts)),
            (5usize, p.beta * C64::from_polar(1.0, -p.e2 * ts)),
        ];
        for (i, z) in expect {
            assert!((psi.amp(i) - z).norm() < 1e-15);
        }
        for i in [0, 2, 3, 4] {
            assert!(psi.amp(i).norm() < 1e-15);
        }
    }

    #[test]
    fn recoherence_after_half_period() {
        // at t = π/λ the pointer rotation has sent |0⟩_e to −|0⟩_e
        let p = even();
        let psi = closed_form_propagator(&p, PI / p.lambda)
            .unwrap()
            .evolve(&p.initial_state())
            .unwrap();
        let h = build_hamiltonian(&p).unwrap().total();
        let branches = branch_decompose(&psi, &h, ENVIRONMENT).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].label, "0");
        assert!((branches[0].weight - 1.0).abs() < 1e-12);
        assert!((psi.amp(0) + p.alpha * C64::from_polar(1.0, -p.e1 * PI)).norm() < 1e-15);
    }

    #[test]
    fn branched_state_decomposes_into_two_worlds() {
        let p = ToyParams::new(c(0.6, 0.), c(0.8, 0.), 1.5, -2.0, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap().total();
        let z = c(0., 0.);
        let psi1 = StateVector::new(toy_basis(), vec![z, p.alpha, z, z, z, p.beta]).unwrap();
        let b = branch_decompose(&psi1, &h, ENVIRONMENT).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].label.as_str(), b[1].label.as_str()), ("1", "2"));
        assert!((b[0].weight - 0.36).abs() < 1e-15 && (b[1].weight - 0.64).abs() < 1e-15);
        assert!((b[0].energy - 1.5).abs() < 1e-15 && (b[1].energy + 2.0).abs() < 1e-15);
        // unbranched initial state: one branch at the mean energy
        let b0 = branch_decompose(&p.initial_state(), &h, ENVIRONMENT).unwrap();
        assert_eq!(b0.len(), 1);
        assert!((b0[0].energy - p.mean_energy()).abs() < 1e-15);
        assert!(branch_decompose(&psi1, &h, "bath").is_err());
    }

    #[test]
    fn pure_level_has_one_branch_at_all_times() {
        let p = ToyParams::new(c(1., 0.), c(0., 0.), 1.25, 3.0, 0.8).unwrap();
        let h = build_hamiltonian(&p).unwrap().total();
        for k in 0..40 {
            let t = k as f64 * 0.3;
            let psi = closed_form_propagator(&p, t)
                .unwrap()
                .evolve(&p.initial_state())
                .unwrap();
            let energies: Vec<f64> = branch_decompose(&psi, &h, ENVIRONMENT)
                .unwrap()
                .iter()
                .map(|b| b.energy)
                .collect();
            assert!(energies.iter().all(|e| (e - 1.25).abs() < 1e-12));
        }
    }

    #[test]
    fn audit_of_even_superposition() {
        let p = even();
        let times: Vec<f64> = vec![0.0, 0.5, p.decoherence_time(), 2.5];
        let ledger = branch_energy_audit(&p, &times).unwrap();
        let globals: Vec<f64> = ledger
            .iter()
            .filter(|e| e.event == LedgerEvent::Evolve)
            .map(|e| e.total_energy)
            .collect();
        assert_eq!(globals.len(), 4);
        assert!(globals.iter().all(|e| (e - 2.0).abs() < 1e-10));
        let at_star: Vec<(String, f64)> = ledger
            .iter()
            .filter(|e| e.event == LedgerEvent::Branch && e.time == p.decoherence_time())
            .map(|e| (e.branch.as_ref().unwrap().label.clone(), e.total_energy))
            .collect();
        assert_eq!(at_star.len(), 2);
        assert!((at_star[0].1 - 1.0).abs() < 1e-10 && (at_star[1].1 - 3.0).abs() < 1e-10);
        for e in ledger.iter() {
            assert_eq!(e.subsystem_energies["environment"], 0.0);
        }
    }

    #[test]
    fn audit_without_superposition_has_no_deltas() {
        let p = ToyParams::new(c(0., 1.), c(0., 0.), 1.0, 3.0, 1.0).unwrap();
        let times: Vec<f64> = (0..25).map(|k| k as f64 * 0.2).collect();
        let ledger = branch_energy_audit(&p, &times).unwrap();
        assert!(ledger.iter().all(|e| e.delta.abs() < 1e-12));
    }

    #[test]
    fn spectral_support_of_eigenstate() {
        let p = ToyParams::new(c(1., 0.), c(0., 0.), 0.5, 2.0, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap().total();
        let e = eigh(&h).unwrap();
        let psi = StateVector::normalized_vector(toy_basis(), e.vector(0)).unwrap();
        let support = spectral_support(&h, &psi).unwrap();
        assert_eq!(support.len(), 1);
        assert!((support[0].0 - e.values[0]).abs() < 1e-12);
        assert!((support[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_filter_the_spectrum() {
        // block eigenvalues: E₁ + {−λ, 0, λ} and E₂ + {−λ, 0, λ}, kept disjoint
        let p = ToyParams::new(c(0.6, 0.), c(0.8, 0.), 0.0, 10.0, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap().total();
        let psi = closed_form_propagator(&p, p.decoherence_time())
            .unwrap()
            .evolve(&p.initial_state())
            .unwrap();
        let branches = branch_decompose(&psi, &h, ENVIRONMENT).unwrap();
        let first = branch_spectral_support(&h, &branches[0]).unwrap();
        assert!(first.iter().all(|&(e, _)| e.abs() <= 1.0 + 1e-10));
        let total: f64 = first.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);

        // before branching: both blocks, each carrying its Born weight
        let global = spectral_support(&h, &p.initial_state()).unwrap();
        let low: f64 = global
            .iter()
            .filter(|&&(e, _)| e < 5.0)
            .map(|&(_, w)| w)
            .sum();
        let high: f64 = global
            .iter()
            .filter(|&&(e, _)| e > 5.0)
            .map(|&(_, w)| w)
            .sum();
        assert!((low - 0.36).abs() < 1e-12 && (high - 0.64).abs() < 1e-12);
        assert!(global.iter().any(|&(e, _)| e < 5.0) && global.iter().any(|&(e, _)| e > 5.0));
    }
}
