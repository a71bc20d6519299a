//! Propagation strategies: the exact exponential for static Hamiltonians,
//! the exponential of the integrated Hamiltonian (first-order Magnus), and a
//! time-ordered midpoint stepper used as the brute-force reference.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quantum_core::{
    expm_skew, expm_skew_matrix, BasisLabel, Operator, OperatorKind, StateVector,
};
use crate::C64;

/// Uniform grid `t0 = t_0 < t_1 < … < t_steps = tf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    tf: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, tf: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite()) || tf <= t0 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs finite t0 < tf, got [{t0}, {tf}]"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "time grid needs at least one step".into(),
            ));
        }
        Ok(Self { t0, tf, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        (self.tf - self.t0) / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.tf
        } else {
            self.t0 + k as f64 * self.dt()
        }
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        self.t0 + (k as f64 + 0.5) * self.dt()
    }

    /// Same interval, `steps` replaced.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(self.t0, self.tf, steps)
    }
}

/// A Hamiltonian that depends on time, on a fixed basis.
pub struct HamiltonianFn<'a> {
    basis: BasisLabel,
    eval: Box<dyn Fn(f64) -> Operator + Send + Sync + 'a>,
}

impl<'a> HamiltonianFn<'a> {
    pub fn new(basis: BasisLabel, eval: impl Fn(f64) -> Operator + Send + Sync + 'a) -> Self {
        Self {
            basis,
            eval: Box::new(eval),
        }
    }

    /// Time-independent Hamiltonian.
    pub fn constant(h: Operator) -> Self {
        let basis = h.basis().clone();
        Self::new(basis, move |_| h.clone())
    }

    pub fn basis(&self) -> &BasisLabel {
        &self.basis
    }

    /// Evaluates `H(t)` and checks that it is Hermitian on the right basis.
    pub fn at(&self, t: f64) -> Result<Operator> {
        let h = (self.eval)(t);
        h.basis().ensure_same(&self.basis)?;
        h.require(OperatorKind::Hermitian)?;
        Ok(h)
    }
}

/// `exp(−iHt)|ψ₀⟩` for time-independent `H`.
pub fn evolve_static(h: &Operator, t: f64, psi0: &StateVector) -> Result<StateVector> {
    h.basis().ensure_same(psi0.basis())?;
    expm_skew(h, t)?.evolve(psi0)
}

/// Composite Simpson rule for `∫ H dt` over the grid; needs an even step count.
pub fn integrate_simpson(hfn: &HamiltonianFn<'_>, grid: &TimeGrid) -> Result<Operator> {
    let n = grid.steps();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Simpson integration needs an even number of steps, got {n}"
        )));
    }
    let d = hfn.basis().dim();
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += hfn.at(grid.time(k))?.entries() * C64::new(w, 0.0);
    }
    acc *= C64::new(grid.dt() / 3.0, 0.0);
    // entries (i,j) and (j,i) accumulate conjugate terms in the same order
    Operator::hermitian(hfn.basis().clone(), acc)
}

/// `exp(−i∫H dt)|ψ₀⟩`, using `integrated` when given and Simpson's rule on
/// the grid otherwise. This is exact only if `H` commutes with itself at
/// different times.
pub fn evolve_magnus1(
    hfn: &HamiltonianFn<'_>,
    grid: &TimeGrid,
    psi0: &StateVector,
    integrated: Option<&Operator>,
) -> Result<StateVector> {
    hfn.basis().ensure_same(psi0.basis())?;
    let owned;
    let integral = match integrated {
        Some(op) => {
            op.basis().ensure_same(psi0.basis())?;
            op.require(OperatorKind::Hermitian)?;
            op
        }
        None => {
            owned = integrate_simpson(hfn, grid)?;
            &owned
        }
    };
    evolve_static(integral, 1.0, psi0)
}

/// Result of a time-ordered propagation with its convergence diagnostics.
#[derive(Debug, Clone)]
pub struct OrderedEvolution {
    pub state: StateVector,
    pub steps: usize,
    /// `‖ψ(steps) − ψ(steps/2)‖`; `None` for a single-step grid.
    pub residual: Option<f64>,
    /// `| ‖ψ‖ − 1 |` after the last step.
    pub norm_drift: f64,
}

/// `Π_k exp(−i·H(t_k + dt/2)·dt)|ψ₀⟩`, later times to the left. Each factor
/// is an exact unitary; the global error is second order in `dt`.
pub fn evolve_ordered(
    hfn: &HamiltonianFn<'_>,
    grid: &TimeGrid,
    psi0: &StateVector,
) -> Result<OrderedEvolution> {
    hfn.basis().ensure_same(psi0.basis())?;
    let fine = step_through(hfn, grid, psi0.amps().clone(), |_, _| {})?;
    let residual = if grid.steps() >= 2 {
        let coarse_grid = grid.with_steps(grid.steps() / 2)?;
        let coarse = step_through(hfn, &coarse_grid, psi0.amps().clone(), |_, _| {})?;
        Some((&fine - &coarse).norm())
    } else {
        None
    };
    let norm_drift = (fine.norm() - 1.0).abs();
    Ok(OrderedEvolution {
        state: StateVector::from_evolution(psi0.basis().clone(), fine),
        steps: grid.steps(),
        residual,
        norm_drift,
    })
}

/// Time-ordered propagation that also returns the state after every
/// `every`-th step (and always the final one), starting with `(t0, ψ₀)`.
pub fn ordered_snapshots(
    hfn: &HamiltonianFn<'_>,
    grid: &TimeGrid,
    psi0: &StateVector,
    every: usize,
) -> Result<Vec<(f64, StateVector)>> {
    hfn.basis().ensure_same(psi0.basis())?;
    let every = every.max(1);
    let basis = psi0.basis().clone();
    let mut out = vec![(grid.t0(), psi0.clone())];
    step_through(hfn, grid, psi0.amps().clone(), |k, amps| {
        if (k + 1) % every == 0 || k + 1 == grid.steps() {
            out.push((
                grid.time(k + 1),
                StateVector::from_evolution(basis.clone(), amps.clone()),
            ));
        }
    })?;
    Ok(out)
}

fn step_through(
    hfn: &HamiltonianFn<'_>,
    grid: &TimeGrid,
    mut amps: DVector<C64>,
    mut visit: impl FnMut(usize, &DVector<C64>),
) -> Result<DVector<C64>> {
    let dt = grid.dt();
    for k in 0..grid.steps() {
        let h = hfn.at(grid.midpoint(k))?;
        amps = expm_skew_matrix(h.entries(), dt) * amps;
        visit(k, &amps);
    }
    Ok(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{expectation, Subsystem};

    fn qubit() -> BasisLabel {
        BasisLabel::single(Subsystem::spin_half("q"))
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_h() -> Operator {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.4, 0.), c(0.3, -0.2), c(0.3, 0.2), c(-1.1, 0.)]);
        Operator::hermitian(qubit(), m).unwrap()
    }

    fn sample_psi() -> StateVector {
        StateVector::normalized(qubit(), vec![c(0.6, 0.1), c(-0.2, 0.5)]).unwrap()
    }

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(TimeGrid::new(1.0, 1.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(f64::NEG_INFINITY, 1.0, 4).is_err());
    }

    #[test]
    fn static_at_zero_time_is_identity() {
        let psi = sample_psi();
        let out = evolve_static(&sample_h(), 0.0, &psi).unwrap();
        assert!(out.max_abs_diff(&psi).unwrap() < 1e-15);
    }

    #[test]
    fn eigenstate_only_picks_up_a_phase() {
        let h = Operator::diagonal(qubit(), &[1.3, -0.4]).unwrap();
        let up = StateVector::basis_state(qubit(), 0).unwrap();
        for t in [0.5, 3.0, 17.0] {
            let out = evolve_static(&h, t, &up).unwrap();
            assert!((out.amp(0) - C64::from_polar(1.0, -1.3 * t)).norm() < 1e-14);
            assert!(out.amp(1).norm() < 1e-15);
        }
    }

    #[test]
    fn static_energy_is_conserved() {
        let h = sample_h();
        let psi = sample_psi();
        let e0 = expectation(&h, &psi).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let e = expectation(&h, &evolve_static(&h, t, &psi).unwrap()).unwrap();
            assert!((e - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn commuting_case_all_routes_agree() {
        let h = sample_h();
        let psi = sample_psi();
        let hfn = HamiltonianFn::constant(h.clone());
        let grid = TimeGrid::new(0.0, 2.5, 10_000).unwrap();
        let exact = evolve_static(&h, 2.5, &psi).unwrap();
        let magnus = evolve_magnus1(&hfn, &grid, &psi, None).unwrap();
        let ordered = evolve_ordered(&hfn, &grid, &psi).unwrap();
        assert!(magnus.max_abs_diff(&exact).unwrap() < 1e-10);
        assert!(ordered.state.max_abs_diff(&exact).unwrap() < 1e-10);
        assert!(ordered.residual.unwrap() < 1e-10);
    }

    #[test]
    fn simpson_needs_even_steps() {
        let hfn = HamiltonianFn::constant(sample_h());
        let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
        assert!(integrate_simpson(&hfn, &grid).is_err());
    }

    #[test]
    fn snapshots_end_at_final_state() {
        let hfn = HamiltonianFn::new(qubit(), |t| {
            Operator::diagonal(qubit(), &[t.cos(), -t.cos()]).unwrap()
        });
        let grid = TimeGrid::new(0.0, 3.0, 300).unwrap();
        let psi = sample_psi();
        let snaps = ordered_snapshots(&hfn, &grid, &psi, 100).unwrap();
        assert_eq!(snaps.len(), 4);
        assert_eq!(snaps[3].0, 3.0);
        let full = evolve_ordered(&hfn, &grid, &psi).unwrap();
        assert_eq!(snaps[3].1, full.state);
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let other = BasisLabel::single(Subsystem::spin_half("r"));
        let psi = StateVector::basis_state(other, 0).unwrap();
        assert!(matches!(
            evolve_static(&sample_h(), 1.0, &psi),
            Err(Error::BasisMismatch(_))
        ));
    }
}
