use qenergy_core::measurement::{entanglement_eigenvalues, entropy_of, project_onto};
use qenergy_core::propagators::{ordered_snapshots, TimeGrid};
use qenergy_core::quantum_core::{expectation, StateVector};
use qenergy_core::spin_protocol::{
    analytic_state, asymptotic_entanglement, coupling_integrals_closed, field_hamiltonian,
    initial_state, probe_measurement_basis, protocol_hamiltonian_fn, run_protocol, Propagator,
    ProtocolParams, PARTICLE1,
};

use crate::output::{num, CsvDoc};
use crate::CliError;

pub const HEADER: [&str; 7] = [
    "t",
    "theta",
    "xi_re",
    "xi_im",
    "k_minus",
    "k_plus",
    "entropy_nats",
];
pub const FOOTER_HEADER: [&str; 3] = ["outcome", "probability", "delta_E"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSettings {
    pub params: ProtocolParams,
    pub seed: u64,
    pub steps: usize,
    pub propagator: Propagator,
    pub samples: usize,
}

fn trajectory(s: &SpinSettings) -> Result<Vec<(f64, StateVector)>, CliError> {
    let p = &s.params;
    match s.propagator {
        Propagator::Magnus1 => {
            let n = (s.samples - 1) as f64;
            (0..s.samples)
                .map(|k| {
                    let t = if k + 1 == s.samples {
                        p.tf
                    } else {
                        p.t0 + (p.tf - p.t0) * k as f64 / n
                    };
                    Ok((t, analytic_state(p, t).map_err(CliError::failed)?))
                })
                .collect()
        }
        Propagator::Ordered => {
            let grid = TimeGrid::new(p.t0, p.tf, s.steps).map_err(CliError::config)?;
            let every = (s.steps / (s.samples - 1)).max(1);
            ordered_snapshots(&protocol_hamiltonian_fn(p), &grid, &initial_state(p), every)
                .map_err(CliError::failed)
        }
    }
}

/// Trajectory rows, then the `±y` readout of the probe at `t_f`.
pub fn render(s: &SpinSettings) -> Result<String, CliError> {
    let p = &s.params;
    let run = run_protocol(p, s.propagator, s.steps, s.seed).map_err(CliError::failed)?;
    let asym = asymptotic_entanglement(p);

    let mut doc = CsvDoc::new();
    doc.comment("qenergy spin: probe spin 2 flies past spin 1, then is measured along y");
    doc.comment(format!(
        "g={} b={} v={} omega={} phi0={}",
        num(p.g),
        num(p.b),
        num(p.v),
        num(p.omega),
        num(p.phi0)
    ));
    let mode = match s.propagator {
        Propagator::Magnus1 => "magnus1".to_string(),
        Propagator::Ordered => format!("ordered steps={}", s.steps),
    };
    doc.comment(format!("propagator={mode} seed={}", s.seed));
    doc.comment(format!("t0={} tf={}", num(p.t0), num(p.tf)));
    doc.comment("theta and xi accumulate from t = -inf; Omega = omega*(t - t0), so phases depend on t0 but k and probabilities do not");
    doc.comment(format!(
        "theta_inf={} k_inf=({}, {})",
        num(asym.theta_inf),
        num(asym.k_minus),
        num(asym.k_plus)
    ));
    doc.record(HEADER)?;
    for (t, psi) in trajectory(s)? {
        let c = coupling_integrals_closed(p, t);
        let (km, kp) = entanglement_eigenvalues(&psi, PARTICLE1).map_err(CliError::failed)?;
        doc.record([
            num(t),
            num(c.theta),
            num(c.xi.re),
            num(c.xi.im),
            num(km),
            num(kp),
            num(entropy_of(&[km, kp])),
        ])?;
    }

    if let Some(r) = run.residual {
        doc.comment(format!("convergence: {}", num(r)));
        doc.comment(format!("norm drift: {}", num(run.norm_drift)));
        let magnus = analytic_state(p, p.tf).map_err(CliError::failed)?;
        let dev = run
            .pre_measurement
            .distance(&magnus)
            .map_err(CliError::failed)?;
        doc.comment(format!("magnus1 deviation: {}", num(dev)));
    }

    let basis = probe_measurement_basis().map_err(CliError::failed)?;
    let field = field_hamiltonian(p);
    doc.comment(format!(
        "sampled outcome: {} (seed {}), delta_E={}",
        run.outcome.label,
        s.seed,
        num(run.delta_e)
    ));
    doc.record(FOOTER_HEADER)?;
    for (i, label) in basis.labels().iter().enumerate() {
        let prob = run.probabilities[i];
        let delta = if prob > 0.0 {
            let (_, post) =
                project_onto(&run.pre_measurement, &basis, i).map_err(CliError::failed)?;
            num(expectation(&field, &post).map_err(CliError::failed)? - run.initial_energy)
        } else {
            String::new()
        };
        doc.record([label.clone(), num(prob), delta])?;
    }
    Ok(doc.into_string())
}
