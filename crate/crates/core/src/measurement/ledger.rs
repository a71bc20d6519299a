use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::quantum_core::{expectation, Operator, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerEvent {
    Evolve,
    Branch,
    Collapse,
}

impl fmt::Display for LedgerEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LedgerEvent::Evolve => "evolve",
            LedgerEvent::Branch => "branch",
            LedgerEvent::Collapse => "collapse",
        })
    }
}

/// Identifies the branch an entry describes and its Born weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTag {
    pub label: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub time: f64,
    /// `⟨ψ_post|H|ψ_post⟩`.
    pub total_energy: f64,
    pub subsystem_energies: BTreeMap<String, f64>,
    pub event: LedgerEvent,
    /// `⟨ψ_post|H|ψ_post⟩ − ⟨ψ_pre|H|ψ_pre⟩`.
    pub delta: f64,
    pub branch: Option<BranchTag>,
}

/// Time-stamped record of `⟨H⟩` across evolution, branching and collapse.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn last(&self) -> Option<&LedgerEntry> {
        self.entries.last()
    }

    /// Appends an entry whose delta is the change of `⟨H⟩` from `pre` to `post`.
    pub fn record(
        &mut self,
        h: &Operator,
        pre: &StateVector,
        post: &StateVector,
        event: LedgerEvent,
        time: f64,
    ) -> Result<&LedgerEntry> {
        self.record_parts(h, pre, post, event, time, &[], None)
    }

    /// Like [`record`](Self::record), also storing `⟨post|A|post⟩` for each
    /// named part and an optional branch tag.
    #[allow(clippy::too_many_arguments)]
    pub fn record_parts(
        &mut self,
        h: &Operator,
        pre: &StateVector,
        post: &StateVector,
        event: LedgerEvent,
        time: f64,
        parts: &[(&str, &Operator)],
        branch: Option<BranchTag>,
    ) -> Result<&LedgerEntry> {
        let before = expectation(h, pre)?;
        let after = expectation(h, post)?;
        let subsystem_energies = parts
            .iter()
            .map(|(name, op)| Ok((name.to_string(), expectation(op, post)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        self.entries.push(LedgerEntry {
            time,
            total_energy: after,
            subsystem_energies,
            event,
            delta: after - before,
            branch,
        });
        Ok(self.entries.last().expect("just pushed"))
    }

    pub fn iter(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter()
    }

    /// Sum of all recorded deltas.
    pub fn net_delta(&self) -> f64 {
        self.entries.iter().map(|e| e.delta).sum()
    }
}
