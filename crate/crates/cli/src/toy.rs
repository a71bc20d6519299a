use qenergy_core::everett_toy::{branch_energy_audit, ToyParams};
use qenergy_core::measurement::LedgerEvent;

use crate::output::{num, CsvDoc};
use crate::CliError;

pub const HEADER: [&str; 6] = [
    "t",
    "global_energy",
    "h_int_expect",
    "branch_label",
    "branch_weight",
    "branch_energy",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToySettings {
    pub params: ToyParams,
    pub t_max: f64,
    pub t_steps: usize,
}

impl ToySettings {
    /// `t_steps` equally spaced times from 0 to `t_max` inclusive.
    pub fn times(&self) -> Vec<f64> {
        if self.t_steps == 1 {
            return vec![0.0];
        }
        let n = (self.t_steps - 1) as f64;
        (0..self.t_steps)
            .map(|k| self.t_max * k as f64 / n)
            .collect()
    }
}

/// One row per (time, branch); the branch label is the environment level.
pub fn render(s: &ToySettings) -> Result<String, CliError> {
    let p = &s.params;
    let ledger = branch_energy_audit(p, &s.times()).map_err(CliError::failed)?;

    let mut doc = CsvDoc::new();
    doc.comment("qenergy toy: system {1,2} coupled to environment {0,1,2}");
    doc.comment(format!(
        "alpha={},{} beta={},{} e1={} e2={} lambda={}",
        num(p.alpha.re),
        num(p.alpha.im),
        num(p.beta.re),
        num(p.beta.im),
        num(p.e1),
        num(p.e2),
        num(p.lambda)
    ));
    doc.comment(format!(
        "t_star={} t_max={} t_steps={}",
        num(p.decoherence_time()),
        num(s.t_max),
        s.t_steps
    ));
    doc.record(HEADER)?;

    let (mut global, mut h_int) = (f64::NAN, f64::NAN);
    for e in ledger.iter() {
        match (e.event, &e.branch) {
            (LedgerEvent::Evolve, _) => {
                global = e.total_energy;
                h_int = e.subsystem_energies["interaction"];
            }
            (LedgerEvent::Branch, Some(tag)) => doc.record([
                num(e.time),
                num(global),
                num(h_int),
                tag.label.clone(),
                num(tag.weight),
                num(e.total_energy),
            ])?,
            _ => {}
        }
    }
    Ok(doc.into_string())
}
