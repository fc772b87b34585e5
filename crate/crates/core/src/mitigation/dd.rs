//! Dynamical decoupling: X pairs in idle windows of a timed ASAP schedule.

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};

/// Gate durations in nanoseconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDurations {
    /// Physical single-qubit gates (`X`, `SX`, `RX`, `Y`, `H`).
    pub one_qubit: f64,
    /// Frame changes (`RZ`, `Z`).
    pub virtual_z: f64,
    pub cz: f64,
    /// Other two-qubit gates (`CNOT`, `RZZ`); `SWAP` counts three of these.
    pub two_qubit: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        Self { one_qubit: 32.0, virtual_z: 0.0, cz: 68.0, two_qubit: 68.0 }
    }
}

impl GateDurations {
    pub fn of(&self, g: &Gate) -> f64 {
        match g.kind() {
            GateKind::Barrier => 0.0,
            GateKind::RZ | GateKind::Z => self.virtual_z,
            GateKind::CZ => self.cz,
            GateKind::SWAP => 3.0 * self.two_qubit,
            _ if g.is_two_qubit() => self.two_qubit,
            _ => self.one_qubit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for d in [self.one_qubit, self.virtual_z, self.cz, self.two_qubit] {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidParameter(format!("gate duration {d} must be non-negative")));
            }
        }
        if self.one_qubit <= 0.0 {
            return Err(Error::InvalidParameter("X duration must be positive".into()));
        }
        Ok(())
    }
}

/// Idle window on one qubit between two of its gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdleWindow {
    pub qubit: usize,
    pub start: f64,
    pub length: f64,
    /// Start times of the inserted pulses, if the window was filled.
    pub pulses: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DdReport {
    pub windows: Vec<IdleWindow>,
}

impl DdReport {
    pub fn filled(&self) -> usize {
        self.windows.iter().filter(|w| w.pulses.is_some()).count()
    }

    pub fn skipped(&self) -> usize {
        self.windows.len() - self.filled()
    }
}

/// ASAP start times; barriers synchronise all qubits.
pub fn schedule_times(c: &QuantumCircuit, d: &GateDurations) -> Vec<f64> {
    let mut ready = vec![0.0f64; c.num_qubits()];
    let mut out = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.is_barrier() {
            let top = ready.iter().copied().fold(0.0, f64::max);
            ready.iter_mut().for_each(|r| *r = top);
            out.push(top);
            continue;
        }
        let start = g.qubits().iter().map(|&q| ready[q]).fold(0.0, f64::max);
        let end = start + d.of(g);
        for &q in g.qubits() {
            ready[q] = end;
        }
        out.push(start);
    }
    out
}

/// Fill every interior idle window of at least two X durations with the
/// sequence `t/4, X, t/2, X, t/4` (pulse centres at the quarter points).
/// The inserted pair follows the gate that opens the window, so the logical
/// circuit is unchanged.
pub fn insert_dd(c: &QuantumCircuit, d: &GateDurations) -> Result<(QuantumCircuit, DdReport)> {
    d.validate()?;
    let times = schedule_times(c, d);
    let mut last: Vec<Option<(usize, f64)>> = vec![None; c.num_qubits()];
    // pulses to emit after gate index i
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    let mut report = DdReport::default();
    let dx = d.one_qubit;
    for (i, g) in c.gates().iter().enumerate() {
        if g.is_barrier() {
            continue;
        }
        for &q in g.qubits() {
            if let Some((j, end)) = last[q] {
                let length = times[i] - end;
                if length > 0.0 {
                    let pulses = (length >= 2.0 * dx).then(|| [end + length / 4.0 - dx / 2.0, end + 3.0 * length / 4.0 - dx / 2.0]);
                    if pulses.is_some() {
                        after[j].push(q);
                    }
                    report.windows.push(IdleWindow { qubit: q, start: end, length, pulses });
                }
            }
            last[q] = Some((i, times[i] + d.of(g)));
        }
    }
    let mut out = QuantumCircuit::new(c.num_qubits());
    for (i, (g, &tag)) in c.gates().iter().zip(c.tags()).enumerate() {
        out.set_tag(tag);
        out.push(*g)?;
        for &q in &after[i] {
            out.push(Gate::x(q))?;
            out.push(Gate::x(q))?;
        }
    }
    Ok((out, report))
}
