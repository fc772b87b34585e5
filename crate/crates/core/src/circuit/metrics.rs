use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Gate, GateKind, QuantumCircuit};

/// As-soon-as-possible layer of every gate (1-based; barriers get 0).
///
/// A gate sits one layer after the latest earlier gate sharing a qubit with
/// it. A barrier pushes every qubit's frontier to the current maximum, so no
/// later gate shares a layer with an earlier one.
pub fn layer_assignment(c: &QuantumCircuit) -> Vec<usize> {
    let mut frontier = vec![0usize; c.num_qubits()];
    let mut out = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.is_barrier() {
            let top = frontier.iter().copied().max().unwrap_or(0);
            frontier.iter_mut().for_each(|f| *f = top);
            out.push(0);
            continue;
        }
        let layer = 1 + g.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in g.qubits() {
            frontier[q] = layer;
        }
        out.push(layer);
    }
    out
}

/// Number of ASAP layers containing at least one gate accepted by `filter`.
pub fn depth(c: &QuantumCircuit, filter: impl Fn(&Gate) -> bool) -> usize {
    let layers = layer_assignment(c);
    let mut hit: Vec<usize> = c
        .gates()
        .iter()
        .zip(&layers)
        .filter(|(g, _)| !g.is_barrier() && filter(g))
        .map(|(_, &l)| l)
        .collect();
    hit.sort_unstable();
    hit.dedup();
    hit.len()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub depth: usize,
    pub two_qubit_depth: usize,
    pub counts: BTreeMap<GateKind, usize>,
}

impl DepthReport {
    pub fn count(&self, kind: GateKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn total_gates(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn csv_header() -> String {
        let mut h = String::from("depth,two_qubit_depth");
        for k in GateKind::ALL.iter().filter(|k| **k != GateKind::Barrier) {
            h.push(',');
            h.push_str(&k.name().to_ascii_lowercase());
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut r = format!("{},{}", self.depth, self.two_qubit_depth);
        for k in GateKind::ALL.iter().filter(|k| **k != GateKind::Barrier) {
            r.push_str(&format!(",{}", self.count(*k)));
        }
        r
    }
}

pub fn gate_counts(c: &QuantumCircuit) -> DepthReport {
    let mut counts = BTreeMap::new();
    for g in c.gates().iter().filter(|g| !g.is_barrier()) {
        *counts.entry(g.kind()).or_insert(0) += 1;
    }
    DepthReport {
        depth: depth(c, |_| true),
        two_qubit_depth: depth(c, Gate::is_two_qubit),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_and_simple_depths() {
        let c = QuantumCircuit::new(3);
        assert_eq!(depth(&c, |_| true), 0);
        assert_eq!(gate_counts(&c), DepthReport::default());

        let mut c = QuantumCircuit::new(2);
        c.push(Gate::rz(0, 0.1)).unwrap();
        c.push(Gate::rz(1, 0.2)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        assert_eq!(depth(&c, |_| true), 2);
        assert_eq!(depth(&c, Gate::is_two_qubit), 1);
    }

    #[test]
    fn single_swap_report() {
        let mut c = QuantumCircuit::new(2);
        c.push(Gate::swap(0, 1)).unwrap();
        let r = gate_counts(&c);
        assert_eq!(r.depth, 1);
        assert_eq!(r.two_qubit_depth, 1);
        assert_eq!(r.count(GateKind::SWAP), 1);
        assert_eq!(r.total_gates(), 1);
        assert_eq!(DepthReport::csv_header().split(',').count(), r.csv_row().split(',').count());
    }

    #[test]
    fn barrier_separates_layers() {
        let mut c = QuantumCircuit::new(2);
        c.push(Gate::x(0)).unwrap();
        c.push(Gate::x(1)).unwrap();
        assert_eq!(depth(&c, |_| true), 1);
        let mut c = QuantumCircuit::new(2);
        c.push(Gate::x(0)).unwrap();
        c.barrier().unwrap();
        c.push(Gate::x(1)).unwrap();
        assert_eq!(depth(&c, |_| true), 2);
    }

    fn random_gate(n: usize, with_barriers: bool) -> impl Strategy<Value = Gate> {
        let kinds = if with_barriers { 4 } else { 3 };
        (0usize..kinds, 0..n, 1..n, -3.0f64..3.0).prop_map(move |(k, a, off, th)| {
            let b = (a + off) % n;
            match k {
                0 => Gate::rz(a, th),
                1 => Gate::sx(a),
                2 => Gate::cz(a, b),
                _ => Gate::barrier(),
            }
        })
    }

    proptest! {
        #[test]
        fn fresh_qubit_gates_do_not_change_depth(gates in proptest::collection::vec(random_gate(4, false), 0..40)) {
            let mut c = QuantumCircuit::new(4);
            for g in &gates { c.push(*g).unwrap(); }
            let mut wide = QuantumCircuit::new(7);
            wide.push(Gate::cz(4, 5)).unwrap();
            wide.push(Gate::sx(6)).unwrap();
            wide.append(&c).unwrap();
            let d = depth(&c, |_| true);
            prop_assert_eq!(depth(&wide, |_| true), d.max(1));
        }

        #[test]
        fn counts_cover_every_non_barrier_gate(gates in proptest::collection::vec(random_gate(4, true), 0..40)) {
            let mut c = QuantumCircuit::new(4);
            for g in &gates { c.push(*g).unwrap(); }
            let r = gate_counts(&c);
            prop_assert_eq!(r.total_gates(), c.operation_count());
            prop_assert!(r.two_qubit_depth <= r.depth);
        }
    }
}
