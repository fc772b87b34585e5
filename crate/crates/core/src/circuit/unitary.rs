use super::{GateMatrix, QuantumCircuit};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::tolerance::MAX_UNITARY_QUBITS;

/// Dense `2^N × 2^N` unitary of the whole circuit (test scale, N ≤ 10).
/// Row/column bit `k` is qubit `k`.
pub fn circuit_unitary(c: &QuantumCircuit) -> Result<CMatrix> {
    let n = c.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::Capacity { backend: "dense unitary", width: n, cap: MAX_UNITARY_QUBITS });
    }
    let dim = 1usize << n;
    let mut u = CMatrix::identity(dim, dim);
    for g in c.gates() {
        let Some(m) = g.matrix() else { continue };
        // nalgebra storage is column-major: each column is a contiguous state.
        for mut col in u.column_iter_mut() {
            embed(col.as_mut_slice(), g.qubits(), &m);
        }
    }
    Ok(u)
}

fn embed(col: &mut [C64], qubits: &[usize], m: &GateMatrix) {
    let dim = col.len();
    match (m, qubits) {
        (GateMatrix::One(m), &[q]) => {
            let bit = 1 << q;
            for i in (0..dim).filter(|i| i & bit == 0) {
                let (a, b) = (col[i], col[i | bit]);
                col[i] = m[0] * a + m[1] * b;
                col[i | bit] = m[2] * a + m[3] * b;
            }
        }
        (GateMatrix::Two(m), &[q0, q1]) => {
            let (b0, b1) = (1 << q0, 1 << q1);
            for i in (0..dim).filter(|i| i & (b0 | b1) == 0) {
                let idx = [i, i | b0, i | b1, i | b0 | b1];
                let v = idx.map(|k| col[k]);
                for (r, &k) in idx.iter().enumerate() {
                    col[k] = (0..4).map(|c| m[4 * r + c] * v[c]).sum();
                }
            }
        }
        _ => unreachable!("gate arity and matrix size always agree"),
    }
}
