//! Gate-level circuit representation, depth metrics and structural passes.

mod decompose;
mod gate;
mod io;
mod metrics;
mod unitary;

pub use decompose::{decompose_to_basis, is_basis_gate};
pub use gate::{Gate, GateKind, GateMatrix};
pub use io::{from_text, to_text};
pub use metrics::{depth, gate_counts, layer_assignment, DepthReport};
pub use unitary::circuit_unitary;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered gate list over a fixed register. Every gate carries a tag (the
/// Trotter step it belongs to, for builder output); tags never decrease.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    tags: Vec<u32>,
    #[serde(skip)]
    current_tag: u32,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new(), tags: Vec::new(), current_tag: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn tags(&self) -> &[u32] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Tag applied to subsequently pushed gates. Must not decrease.
    pub fn set_tag(&mut self, tag: u32) {
        assert!(tag >= self.current_tag, "circuit tags must be monotone");
        self.current_tag = tag;
    }

    pub fn current_tag(&self) -> u32 {
        self.current_tag
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        self.tags.push(self.current_tag);
        Ok(())
    }

    /// Append all gates of `other` under the current tag.
    pub fn append(&mut self, other: &QuantumCircuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        for g in &other.gates {
            self.push(*g)?;
        }
        Ok(())
    }

    /// Append `other` with its qubit `k` mapped to `offset + k`.
    pub fn append_shifted(&mut self, other: &QuantumCircuit, offset: usize) -> Result<()> {
        for g in &other.gates {
            self.push(g.shifted(offset))?;
        }
        Ok(())
    }

    pub fn barrier(&mut self) -> Result<()> {
        self.push(Gate::barrier())
    }

    /// Contiguous runs of gates sharing a tag, in order.
    pub fn segments(&self) -> Vec<(u32, &[Gate])> {
        let mut out: Vec<(u32, &[Gate])> = Vec::new();
        let mut start = 0;
        for i in 1..=self.gates.len() {
            if i == self.gates.len() || self.tags[i] != self.tags[start] {
                if start < i {
                    out.push((self.tags[start], &self.gates[start..i]));
                }
                start = i;
            }
        }
        out
    }

    /// Rebuild from raw parts, validating every gate and the tag order.
    pub fn from_parts(num_qubits: usize, gates: Vec<Gate>, tags: Vec<u32>) -> Result<Self> {
        if tags.len() != gates.len() {
            return Err(Error::Parse("tag list length differs from gate list".into()));
        }
        if tags.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse("tags must be monotone".into()));
        }
        let mut c = Self::new(num_qubits);
        for (g, t) in gates.into_iter().zip(tags) {
            c.set_tag(t);
            c.push(g)?;
        }
        Ok(c)
    }

    /// Number of gates excluding barriers.
    pub fn operation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind() != GateKind::Barrier).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: QuantumCircuit = serde_json::from_str(s)?;
        Self::from_parts(raw.num_qubits, raw.gates, raw.tags)
    }
}
