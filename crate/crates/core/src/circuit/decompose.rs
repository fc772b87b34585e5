use std::f64::consts::{FRAC_PI_2, PI};

use super::{Gate, GateKind, QuantumCircuit};
use crate::error::Result;

/// Gates native to the target device family (plus barriers).
pub fn is_basis_gate(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::X | GateKind::SX | GateKind::RX | GateKind::RZ | GateKind::CZ | GateKind::RZZ | GateKind::Barrier
    )
}

/// Rewrite into `{X, SX, RX, RZ, CZ, RZZ}`, equal up to global phase.
///
/// Rules: `SWAP → 3 CNOT`, `CNOT(c,t) → H(t) CZ H(t)`, `H → RZ(π/2) SX RZ(π/2)`,
/// `Z → RZ(π)`, `Y → RZ(π) X`. No peephole simplification is done.
pub fn decompose_to_basis(c: &QuantumCircuit) -> Result<QuantumCircuit> {
    let mut out = QuantumCircuit::new(c.num_qubits());
    for (g, &tag) in c.gates().iter().zip(c.tags()) {
        out.set_tag(tag);
        emit(&mut out, g)?;
    }
    Ok(out)
}

fn emit(out: &mut QuantumCircuit, g: &Gate) -> Result<()> {
    let q = g.qubits();
    match g.kind() {
        k if is_basis_gate(k) => out.push(*g),
        GateKind::Z => out.push(Gate::rz(q[0], PI)),
        GateKind::Y => {
            out.push(Gate::rz(q[0], PI))?;
            out.push(Gate::x(q[0]))
        }
        GateKind::H => emit_h(out, q[0]),
        GateKind::CNOT => emit_cnot(out, q[0], q[1]),
        GateKind::SWAP => {
            emit_cnot(out, q[0], q[1])?;
            emit_cnot(out, q[1], q[0])?;
            emit_cnot(out, q[0], q[1])
        }
        _ => unreachable!("every gate kind is handled"),
    }
}

fn emit_h(out: &mut QuantumCircuit, q: usize) -> Result<()> {
    out.push(Gate::rz(q, FRAC_PI_2))?;
    out.push(Gate::sx(q))?;
    out.push(Gate::rz(q, FRAC_PI_2))
}

fn emit_cnot(out: &mut QuantumCircuit, control: usize, target: usize) -> Result<()> {
    emit_h(out, target)?;
    out.push(Gate::cz(control, target))?;
    emit_h(out, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, gate_counts};
    use crate::linalg::matrix_diff_up_to_phase;
    use crate::tolerance::UNITARY_EQ;
    use proptest::prelude::*;

    #[test]
    fn swap_becomes_three_cz() {
        let mut c = QuantumCircuit::new(2);
        c.push(Gate::swap(0, 1)).unwrap();
        let d = decompose_to_basis(&c).unwrap();
        assert_eq!(gate_counts(&d).count(GateKind::CZ), 3);
        assert!(d.gates().iter().all(|g| is_basis_gate(g.kind())));
        let diff = matrix_diff_up_to_phase(&circuit_unitary(&c).unwrap(), &circuit_unitary(&d).unwrap());
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn basis_gates_pass_through() {
        let mut c = QuantumCircuit::new(1);
        c.push(Gate::rz(0, 0.3)).unwrap();
        assert_eq!(decompose_to_basis(&c).unwrap().gates(), c.gates());
    }

    fn any_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0usize..11, 0..n, 1..n, -4.0f64..4.0).prop_map(move |(k, a, off, th)| {
            let b = (a + off) % n;
            match k {
                0 => Gate::x(a),
                1 => Gate::y(a),
                2 => Gate::z(a),
                3 => Gate::sx(a),
                4 => Gate::h(a),
                5 => Gate::rx(a, th),
                6 => Gate::rz(a, th),
                7 => Gate::cnot(a, b),
                8 => Gate::cz(a, b),
                9 => Gate::swap(a, b),
                _ => Gate::rzz(a, b, th),
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn decomposition_preserves_unitary(gates in proptest::collection::vec(any_gate(4), 1..25)) {
            let mut c = QuantumCircuit::new(4);
            for g in &gates { c.push(*g).unwrap(); }
            let d = decompose_to_basis(&c).unwrap();
            prop_assert!(d.gates().iter().all(|g| is_basis_gate(g.kind())));
            let diff = matrix_diff_up_to_phase(&circuit_unitary(&c).unwrap(), &circuit_unitary(&d).unwrap());
            prop_assert!(diff < UNITARY_EQ, "diff {}", diff);
        }
    }
}
