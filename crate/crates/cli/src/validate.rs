//! The acceptance criteria as a registry of named checks.
//!
//! Each check recomputes its quantities from scratch and compares them with
//! an oracle at a fixed tolerance. Reports contain no timings or other
//! run-dependent text, so two runs produce identical bytes.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use qenergy_core::everett_toy::{
    branch_decompose, branch_energy_audit, build_hamiltonian, closed_form_propagator, ToyParams,
    ENVIRONMENT,
};
use qenergy_core::measurement::{
    born_probabilities, entanglement_eigenvalues, project_onto, LedgerEvent, MeasurementBasis,
    OutcomeSampler,
};
use qenergy_core::propagators::{evolve_magnus1, evolve_ordered, TimeGrid};
use qenergy_core::quantum_core::{
    expectation, expm_skew, BasisLabel, Operator, StateVector, Subsystem,
};
use qenergy_core::spin_protocol::{
    analytic_state, coupling_integrals_between, coupling_integrals_closed,
    coupling_integrals_numeric, initial_state, integrated_hamiltonian,
    integrated_hamiltonian_between, probe_measurement_basis, protocol_hamiltonian_fn, run_protocol,
    tune_max_entanglement, Propagator, ProtocolParams, TuneFor, PARTICLE1,
};
use qenergy_core::units::{
    feasibility, HBAR_C_GEV_CM, PUBLISHED_B_SQRT_V_CM, REFERENCE_COUPLING_GEV2,
};
use qenergy_core::C64;

use crate::spin::{self, SpinSettings};

/// Deliberate defects used to confirm that the suite can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Negate `ξ` on the closed-form side of the quadrature comparison.
    pub xi_sign: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

pub struct Criterion {
    pub id: u8,
    pub group: &'static str,
    pub name: &'static str,
    check: fn(&Faults) -> Check,
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.trim().to_ascii_lowercase();
        f.is_empty() || self.group == f || self.name.contains(&f) || self.id.to_string() == f
    }

    pub fn run(&self, faults: &Faults) -> Check {
        (self.check)(faults)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub id: u8,
    pub group: &'static str,
    pub name: &'static str,
    pub check: Check,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<ReportLine>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.check.passed)
    }

    /// `"<id> <name>"` for each failed criterion.
    pub fn failures(&self) -> Vec<String> {
        self.lines
            .iter()
            .filter(|l| !l.check.passed)
            .map(|l| format!("{} {}", l.id, l.name))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(&l.to_string());
            s.push('\n');
        }
        let passed = self.lines.iter().filter(|l| l.check.passed).count();
        s.push_str(&format!("{passed}/{} criteria passed\n", self.lines.len()));
        s
    }
}

impl std::fmt::Display for ReportLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.check.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:>2} {}/{}: {}",
            self.id, self.group, self.name, self.check.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            group: "toy",
            name: "toy-branch-energies",
            check: toy_branch_energies,
        },
        Criterion {
            id: 2,
            group: "toy",
            name: "interaction-energy-vanishes",
            check: interaction_energy_vanishes,
        },
        Criterion {
            id: 3,
            group: "toy",
            name: "closed-form-propagator",
            check: closed_form_propagator_check,
        },
        Criterion {
            id: 4,
            group: "spin",
            name: "quadrature-agreement",
            check: quadrature_agreement,
        },
        Criterion {
            id: 5,
            group: "spin",
            name: "late-time-limits",
            check: late_time_limits,
        },
        Criterion {
            id: 6,
            group: "spin",
            name: "analytic-state",
            check: analytic_state_check,
        },
        Criterion {
            id: 7,
            group: "spin",
            name: "maximal-entanglement",
            check: maximal_entanglement,
        },
        Criterion {
            id: 8,
            group: "measurement",
            name: "energy-shift",
            check: energy_shift,
        },
        Criterion {
            id: 9,
            group: "measurement",
            name: "energy-eigenbasis-consistency",
            check: eigenbasis_consistency,
        },
        Criterion {
            id: 10,
            group: "propagator",
            name: "propagator-convergence",
            check: propagator_convergence,
        },
        Criterion {
            id: 11,
            group: "propagator",
            name: "magnus-error-scaling",
            check: magnus_scaling,
        },
        Criterion {
            id: 12,
            group: "report",
            name: "feasibility-report",
            check: feasibility_report,
        },
        Criterion {
            id: 13,
            group: "determinism",
            name: "determinism",
            check: determinism,
        },
    ]
}

/// Runs every criterion matching `filter` (all when `None`).
pub fn run(filter: Option<&str>, faults: &Faults) -> Report {
    let lines = criteria()
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .map(|c| ReportLine {
            id: c.id,
            group: c.group,
            name: c.name,
            check: c.run(faults),
        })
        .collect();
    Report { lines }
}

macro_rules! tryc {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Check::error(e),
        }
    };
}

fn canonical_toy() -> ToyParams {
    let a = C64::from(FRAC_1_SQRT_2);
    ToyParams::new(a, a, 1.0, 3.0, 1.0).expect("normalized")
}

fn grid_points(t_end: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| t_end * k as f64 / (n - 1) as f64)
}

fn toy_branch_energies(_: &Faults) -> Check {
    let p = canonical_toy();
    let h = tryc!(build_hamiltonian(&p)).total();
    let psi0 = p.initial_state();
    let mut worst = 0.0f64;
    for t in grid_points(4.0 * PI / p.lambda, 100) {
        let psi = tryc!(tryc!(closed_form_propagator(&p, t)).evolve(&psi0));
        worst = worst.max((tryc!(expectation(&h, &psi)) - 2.0).abs());
    }
    let t_star = PI / 2.0;
    let psi = tryc!(tryc!(closed_form_propagator(&p, t_star)).evolve(&psi0));
    let branches = tryc!(branch_decompose(&psi, &h, ENVIRONMENT));
    let mut energies: Vec<(f64, f64)> = branches.iter().map(|b| (b.energy, b.weight)).collect();
    energies.sort_by(|a, b| a.0.total_cmp(&b.0));
    let split = energies.len() == 2
        && (energies[0].0 - 1.0).abs() < 1e-10
        && (energies[1].0 - 3.0).abs() < 1e-10
        && energies.iter().all(|e| (e.1 - 0.5).abs() < 1e-10);
    let audit = branch_energy_audit(&p, &[0.0, t_star]);
    Check::new(
        worst < 1e-10 && split && audit.is_ok(),
        format!(
            "max |<H> - 2| = {worst:.3e} over 100 times; {} branches at t* with (E, w) = {energies:?}",
            energies.len()
        ),
    )
}

fn uniform_toy(rng: &mut OutcomeSampler) -> ToyParams {
    let a = rng.uniform();
    let phase = 2.0 * PI * rng.uniform();
    ToyParams::new(
        C64::from(a.sqrt()),
        C64::from_polar((1.0 - a).sqrt(), phase),
        10.0 * rng.uniform() - 5.0,
        10.0 * rng.uniform() - 5.0,
        0.1 + 3.9 * rng.uniform(),
    )
    .expect("normalized by construction")
}

fn interaction_energy_vanishes(_: &Faults) -> Check {
    let mut rng = OutcomeSampler::new(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = uniform_toy(&mut rng);
        let ham = tryc!(build_hamiltonian(&p));
        for t in grid_points(4.0 * PI / p.lambda, 50) {
            let psi = tryc!(tryc!(closed_form_propagator(&p, t)).evolve(&p.initial_state()));
            worst = worst.max(tryc!(expectation(&ham.h_int, &psi)).abs());
        }
    }
    Check::new(
        worst <= 1e-12,
        format!("max |<H_int>| = {worst:.3e} over 20 draws x 50 times"),
    )
}

fn closed_form_propagator_check(_: &Faults) -> Check {
    let p = canonical_toy();
    let h = tryc!(build_hamiltonian(&p)).total();
    let mut worst = 0.0f64;
    for t in grid_points(4.0 * PI / p.lambda, 100) {
        let closed = tryc!(closed_form_propagator(&p, t));
        let numeric = tryc!(expm_skew(&h, t));
        worst = worst.max(tryc!(closed.max_abs_diff(&numeric)));
    }
    Check::new(
        worst < 1e-10,
        format!("max entrywise |U_closed - expm| = {worst:.3e} over 100 times"),
    )
}

fn quadrature_agreement(faults: &Faults) -> Check {
    let mut worst = 0.0f64;
    let mut literal = 0.0f64;
    for g in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 2.0] {
            for v in [0.1, 0.5, 0.9] {
                let tr = b / v;
                let p = tryc!(ProtocolParams::with_window(
                    g,
                    b,
                    v,
                    1.0,
                    0.0,
                    -1e4 * tr,
                    1e4 * tr
                ));
                for x in [-10.0, -1.0, 0.0, 1.0, 10.0] {
                    let t = x * tr;
                    let q = tryc!(coupling_integrals_numeric(&p, t));
                    let mut c = coupling_integrals_between(&p, p.t0, t);
                    if faults.xi_sign {
                        c.xi = -c.xi;
                    }
                    let rel_theta = (q.theta - c.theta).abs() / c.theta.abs();
                    let rel_xi = (q.xi - c.xi).norm() / c.xi.norm();
                    worst = worst.max(rel_theta).max(rel_xi);
                    let inf = coupling_integrals_closed(&p, t);
                    literal = literal
                        .max((q.theta - inf.theta).abs() / inf.theta.abs())
                        .max((q.xi - inf.xi).norm() / inf.xi.norm());
                }
            }
        }
    }
    Check::new(
        worst <= 1e-8,
        format!(
            "max relative deviation {worst:.3e} vs closed forms over [t0, t] (t0 = -1e4 b/v); \
             against the t0 -> -inf forms it is {literal:.3e}, the truncated 1/r^3 tail"
        ),
    )
}

fn late_time_limits(_: &Faults) -> Check {
    let mut worst = 0.0f64;
    for g in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 2.0] {
            for v in [0.1, 0.5, 0.9] {
                let p = tryc!(ProtocolParams::new(g, b, v, 1.0, 0.0));
                let c = coupling_integrals_closed(&p, 1e6 * p.transit_time());
                let lim = 2.0 * g / (b * b * v);
                worst = worst
                    .max((c.theta - lim).abs() / lim)
                    .max((c.xi - C64::from(lim)).norm() / lim);
            }
        }
    }
    Check::new(
        worst <= 1e-5,
        format!("max relative deviation from 2g/(b^2 v) at t = 1e6 b/v: {worst:.3e}"),
    )
}

fn analytic_state_check(_: &Faults) -> Check {
    let mut rng = OutcomeSampler::new(6);
    let (mut norm_dev, mut worst) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let p = tryc!(ProtocolParams::new(
            0.05 + 2.95 * rng.uniform(),
            0.3 + 2.2 * rng.uniform(),
            0.05 + 0.9 * rng.uniform(),
            6.0 * rng.uniform() - 3.0,
            2.0 * PI * rng.uniform(),
        ));
        let t = (20.0 * rng.uniform() - 10.0) * p.transit_time();
        let psi = tryc!(analytic_state(&p, t));
        norm_dev = norm_dev.max((psi.amps().norm_squared() - 1.0).abs());
        let hfn = protocol_hamiltonian_fn(&p);
        let grid = tryc!(TimeGrid::new(p.t0, p.tf, 2));
        let m = integrated_hamiltonian(&p, t);
        let magnus = tryc!(evolve_magnus1(&hfn, &grid, &initial_state(&p), Some(&m)));
        worst = worst.max(tryc!(psi.max_abs_diff(&magnus)));
    }
    Check::new(
        norm_dev <= 1e-10 && worst <= 1e-10,
        format!("50 draws: max | |psi|^2 - 1 | = {norm_dev:.3e}, max entrywise deviation from magnus1 = {worst:.3e}"),
    )
}

fn maximal_entanglement(_: &Faults) -> Check {
    let geo = tryc!(tune_max_entanglement(1.0, 0, TuneFor::B(1.0)));
    let basis = tryc!(probe_measurement_basis());
    let (mut k_dev, mut p_dev) = (0.0f64, 0.0f64);
    let mut probs: Vec<Vec<f64>> = Vec::new();
    let mut ks: Vec<f64> = Vec::new();
    for phi0 in [0.0, PI / 3.0, PI] {
        let p = tryc!(ProtocolParams::new(1.0, geo.b, geo.v, 2.0, phi0));
        let psi = tryc!(analytic_state(&p, 1e3 * p.transit_time()));
        let (km, kp) = tryc!(entanglement_eigenvalues(&psi, PARTICLE1));
        k_dev = k_dev.max((km - 0.5).abs()).max((kp - 0.5).abs());
        ks.push(km);
        let pr = tryc!(born_probabilities(&psi, &basis));
        p_dev = p_dev.max((pr[0] - 0.5).abs()).max((pr[1] - 0.5).abs());
        probs.push(pr);
    }
    let spread = |xs: &[f64]| {
        xs.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x))
            - xs.iter().fold(f64::INFINITY, |a, &x| a.min(x))
    };
    let p_spread = spread(&probs.iter().map(|p| p[0]).collect::<Vec<_>>());
    let k_spread = spread(&ks);
    Check::new(
        k_dev <= 1e-6 && p_dev <= 1e-9 && p_spread <= 1e-9,
        format!(
            "v = {:.16} at b = 1: max |k - 1/2| = {k_dev:.3e}, max |p - 1/2| = {p_dev:.3e}, \
             probability spread over phi0 = {p_spread:.3e} (k spread {k_spread:.3e})",
            geo.v
        ),
    )
}

fn energy_shift(_: &Faults) -> Check {
    // read out at 10³·b/v, where θ(t_f) has reached π to round-off
    let tr = PI / 2.0;
    let p = tryc!(ProtocolParams::with_window(
        1.0,
        1.0,
        2.0 / PI,
        2.0,
        0.0,
        -200.0 * tr,
        1e3 * tr
    ));
    let mut plus = 0usize;
    let mut worst = 0.0f64;
    const SEEDS: u64 = 10_000;
    for seed in 0..SEEDS {
        let run = tryc!(run_protocol(&p, Propagator::Magnus1, 0, seed));
        let collapse = run
            .ledger
            .entries()
            .iter()
            .find(|e| e.event == LedgerEvent::Collapse);
        let Some(entry) = collapse else {
            return Check::new(false, "ledger has no collapse entry".into());
        };
        let expected = if run.outcome.label == "+y" { 1.0 } else { -1.0 };
        let net = run.final_energy - run.initial_energy;
        worst = worst
            .max((net - expected).abs())
            .max((run.delta_e - net).abs());
        worst = worst.max((entry.total_energy - expected).abs());
        plus += usize::from(expected > 0.0);
    }
    let freq = plus as f64 / SEEDS as f64;
    Check::new(
        worst <= 1e-12 && (freq - 0.5).abs() <= 0.02,
        format!("max |delta_E -/+ 1| = {worst:.3e}; +y frequency {freq:.4} over {SEEDS} seeds"),
    )
}

fn eigenbasis_consistency(_: &Faults) -> Check {
    let mut rng = OutcomeSampler::new(9);
    let basis = tryc!(BasisLabel::new(vec![Subsystem::spin_half("q")]));
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut r = || 2.0 * rng.uniform() - 1.0;
        let amps = vec![C64::new(r(), r()), C64::new(r(), r())];
        let psi = tryc!(StateVector::normalized(basis.clone(), amps));
        let (d0, d1, off) = (5.0 * r(), 5.0 * r(), C64::new(r(), r()));
        let m = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[C64::from(d0), off.conj(), off, C64::from(d1)],
        );
        let h = tryc!(Operator::hermitian(basis.clone(), m));
        let mb = tryc!(MeasurementBasis::from_observable(&h));
        let mut mean = 0.0;
        for i in 0..mb.len() {
            if let Ok((prob, post)) = project_onto(&psi, &mb, i) {
                mean += prob * tryc!(expectation(&h, &post));
            }
        }
        worst = worst.max((mean - tryc!(expectation(&h, &psi))).abs());
    }
    Check::new(
        worst <= 1e-12,
        format!("max |sum p_i E_i - <H>| = {worst:.3e} over 100 states"),
    )
}

fn tuned_protocol() -> ProtocolParams {
    ProtocolParams::new(1.0, 1.0, 2.0 / PI, 2.0, 0.0).expect("valid")
}

fn propagator_convergence(_: &Faults) -> Check {
    let p = tuned_protocol();
    let hfn = protocol_hamiltonian_fn(&p);
    let psi0 = initial_state(&p);
    let run = |n: usize| -> Result<_, qenergy_core::Error> {
        evolve_ordered(&hfn, &TimeGrid::new(p.t0, p.tf, n)?, &psi0)
    };
    let (a, b, c) = (tryc!(run(4_000)), tryc!(run(8_000)), tryc!(run(16_000)));
    let e1 = (a.state.amps() - b.state.amps()).norm();
    let e2 = (b.state.amps() - c.state.amps()).norm();
    let order = (e1 / e2).log2();
    let long = tryc!(run(200_000));
    Check::new(
        (order - 2.0).abs() <= 0.2 && long.norm_drift < 1e-9,
        format!(
            "observed order {order:.4} from 4000/8000/16000 steps; norm drift at 2e5 steps = {:.3e}",
            long.norm_drift
        ),
    )
}

fn magnus_scaling(_: &Faults) -> Check {
    let mut ratios = Vec::new();
    for g in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = ProtocolParams {
            g,
            ..tuned_protocol()
        };
        let hfn = protocol_hamiltonian_fn(&p);
        let psi0 = initial_state(&p);
        let grid = tryc!(TimeGrid::new(p.t0, p.tf, 40_000));
        let ordered = tryc!(evolve_ordered(&hfn, &grid, &psi0)).state;
        let m = integrated_hamiltonian_between(&p, p.t0, p.tf);
        let magnus = tryc!(evolve_magnus1(&hfn, &grid, &psi0, Some(&m)));
        ratios.push(tryc!(ordered.distance(&magnus)) / g);
    }
    let last = (ratios[2] / ratios[3] - 1.0).abs();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4e}")).collect();
    Check::new(
        last < 0.1,
        format!(
            "|ordered - magnus1|/g for g = 1e-1..1e-4: [{}]; last-decade change {last:.3e}",
            shown.join(", ")
        ),
    )
}

fn feasibility_report(_: &Faults) -> Check {
    let r = tryc!(feasibility(REFERENCE_COUPLING_GEV2, PI));
    let direct = (2.0 * REFERENCE_COUPLING_GEV2 / PI).sqrt();
    let ok = (r.b_sqrt_v_gev_inv - direct).abs() <= 1e-15 * direct
        && (r.b_sqrt_v_cm - direct * HBAR_C_GEV_CM).abs() <= 1e-15 * r.b_sqrt_v_cm
        && r.published_cm == PUBLISHED_B_SQRT_V_CM;
    Check::new(
        ok,
        format!(
            "b*sqrt(v) = {:.6} GeV^-1 = {:.4e} cm (hbar*c); published {:.2e} cm; \
             discrepancy factor {:.4} (2*pi = {:.4}; with h*c instead: {:.4e} cm)",
            r.b_sqrt_v_gev_inv,
            r.b_sqrt_v_cm,
            r.published_cm,
            r.discrepancy,
            2.0 * PI,
            r.b_sqrt_v_cm_hc
        ),
    )
}

fn determinism(faults: &Faults) -> Check {
    let first_twelve = || {
        let lines = criteria()
            .into_iter()
            .filter(|c| c.id <= 12)
            .map(|c| ReportLine {
                id: c.id,
                group: c.group,
                name: c.name,
                check: c.run(faults),
            })
            .collect();
        Report { lines }.render()
    };
    let reports_equal = first_twelve() == first_twelve();
    let settings = SpinSettings {
        params: tuned_protocol(),
        seed: 7,
        steps: 1_000,
        propagator: Propagator::Magnus1,
        samples: 101,
    };
    let csv_a = tryc!(spin::render(&settings));
    let csv_b = tryc!(spin::render(&settings));
    let ordered = SpinSettings {
        propagator: Propagator::Ordered,
        samples: 11,
        ..settings
    };
    let ord_a = tryc!(spin::render(&ordered));
    let ord_b = tryc!(spin::render(&ordered));
    Check::new(
        reports_equal && csv_a == csv_b && ord_a == ord_b,
        format!(
            "criteria 1-12 report identical: {reports_equal}; spin CSV identical: magnus1 {}, ordered {}",
            csv_a == csv_b,
            ord_a == ord_b
        ),
    )
}
