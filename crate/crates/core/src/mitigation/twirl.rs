//! Pauli twirling of CZ gates.

use std::sync::OnceLock;

use rand::Rng;

use crate::circuit::{is_basis_gate, Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};
use crate::linalg::{matrix_diff_up_to_phase, CMatrix, C64};
use crate::model::Pauli;
use crate::rng;
use crate::tolerance;

/// Paulis at positions 1, 2 (before the CZ on its first and second qubit)
/// and 3, 4 (after it).
pub type Quadruple = [Pauli; 4];

fn pauli_matrix(p: Pauli) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &p.matrix())
}

fn cz_matrix() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = C64::new(-1.0, 0.0);
    m
}

/// `a` on the first (low) qubit, `b` on the second.
fn pair(a: Pauli, b: Pauli) -> CMatrix {
    pauli_matrix(b).kronecker(&pauli_matrix(a))
}

/// Whether `(P3 ⊗ P4)·CZ·(P1 ⊗ P2) = CZ` up to global phase.
pub fn is_cz_twirl(q: &Quadruple) -> bool {
    let cz = cz_matrix();
    let u = pair(q[2], q[3]) * &cz * pair(q[0], q[1]);
    matrix_diff_up_to_phase(&u, &cz) < tolerance::UNITARY_EQ
}

/// All valid quadruples, found by checking the 256 candidates.
pub fn cz_twirl_set() -> Vec<Quadruple> {
    let mut out = Vec::new();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            for c in Pauli::ALL {
                for d in Pauli::ALL {
                    let q = [a, b, c, d];
                    if is_cz_twirl(&q) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

fn cached_set() -> &'static [Quadruple] {
    static SET: OnceLock<Vec<Quadruple>> = OnceLock::new();
    SET.get_or_init(cz_twirl_set)
}

fn pauli_gate(p: Pauli, q: usize) -> Option<Gate> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(Gate::x(q)),
        Pauli::Y => Some(Gate::y(q)),
        Pauli::Z => Some(Gate::z(q)),
    }
}

fn twirl_once<R: Rng>(c: &QuantumCircuit, r: &mut R) -> Result<QuantumCircuit> {
    let set = cached_set();
    let mut out = QuantumCircuit::new(c.num_qubits());
    for (g, &tag) in c.gates().iter().zip(c.tags()) {
        out.set_tag(tag);
        if g.kind() != GateKind::CZ {
            out.push(*g)?;
            continue;
        }
        let q = set[r.random_range(0..set.len())];
        let (a, b) = (g.qubits()[0], g.qubits()[1]);
        for gate in [pauli_gate(q[0], a), pauli_gate(q[1], b)].into_iter().flatten() {
            out.push(gate)?;
        }
        out.push(*g)?;
        for gate in [pauli_gate(q[2], a), pauli_gate(q[3], b)].into_iter().flatten() {
            out.push(gate)?;
        }
    }
    Ok(out)
}

/// `instances` independently twirled copies of a basis-gate circuit. Every
/// CZ is wrapped in a uniformly drawn quadruple from [`cz_twirl_set`].
pub fn pauli_twirl(c: &QuantumCircuit, instances: usize, seed: u64) -> Result<Vec<QuantumCircuit>> {
    if let Some(g) = c.gates().iter().find(|g| !is_basis_gate(g.kind())) {
        return Err(Error::UnsupportedGate(format!("{g} is not a basis gate; decompose before twirling")));
    }
    (0..instances)
        .map(|i| twirl_once(c, &mut rng::stream(seed, &[i as u64])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, decompose_to_basis};
    use Pauli::*;

    #[test]
    fn sixteen_valid_quadruples() {
        let set = cz_twirl_set();
        assert_eq!(set.len(), 16);
        assert!(set.contains(&[I, I, I, I]));
        assert!(!set.contains(&[Z, X, Z, X]));
        assert!(set.contains(&[Z, X, I, X]));
        assert!(set.contains(&[X, Z, X, I]));
    }

    #[test]
    fn set_is_closed_under_composition() {
        // applying quadruple a then b: before = b_before · a_before, after = a_after · b_after
        let set = cz_twirl_set();
        let mul = |x: Pauli, y: Pauli| -> Pauli {
            let m = pauli_matrix(x) * pauli_matrix(y);
            *Pauli::ALL
                .iter()
                .find(|&&p| matrix_diff_up_to_phase(&m, &pauli_matrix(p)) < 1e-12)
                .unwrap()
        };
        for a in &set {
            for b in &set {
                let composed = [mul(b[0], a[0]), mul(b[1], a[1]), mul(a[2], b[2]), mul(a[3], b[3])];
                assert!(set.contains(&composed), "{a:?} ∘ {b:?}");
            }
        }
    }

    #[test]
    fn twirled_circuits_are_equivalent() {
        let mut c = QuantumCircuit::new(3);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::rz(1, 0.4)).unwrap();
        c.push(Gate::swap(1, 2)).unwrap();
        let basis = decompose_to_basis(&c).unwrap();
        let u = circuit_unitary(&basis).unwrap();
        let twirls = pauli_twirl(&basis, 10, 3).unwrap();
        for t in &twirls {
            assert!(matrix_diff_up_to_phase(&circuit_unitary(t).unwrap(), &u) < 1e-10);
        }
        assert_eq!(pauli_twirl(&basis, 1, 3).unwrap()[0], twirls[0]);
        assert!(pauli_twirl(&c, 1, 0).is_err());
    }
}
