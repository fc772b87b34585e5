//! Exact density-matrix propagation of the depolarizing channel, used to
//! check the trajectory sampler and the exponential extrapolation model.

use hubbard_core::circuit::{circuit_unitary, decompose_to_basis, GateKind, QuantumCircuit};
use hubbard_core::linalg::C64;
use hubbard_core::mitigation::{extrapolate, fold_cz, noisy_expectation, ExecOptions, NoiseModel, ZneFit};
use hubbard_core::model::{neel_operator, HubbardParams, Pauli, PauliTermSum};
use hubbard_core::statevector::StateVector;
use hubbard_core::trotter::{build_circuit, TrotterOrder, TrotterPlan};

struct Density {
    dim: usize,
    rho: Vec<C64>,
}

impl Density {
    fn zero_state(n: usize) -> Self {
        let dim = 1 << n;
        let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
        rho[0] = C64::new(1.0, 0.0);
        Self { dim, rho }
    }

    fn conjugate(&mut self, rows: &[Vec<(usize, C64)>]) {
        let d = self.dim;
        let mut t = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for &(a, u) in &rows[i] {
                for b in 0..d {
                    t[i * d + b] += u * self.rho[a * d + b];
                }
            }
        }
        for i in 0..d {
            for (j, row) in rows.iter().enumerate() {
                self.rho[i * d + j] = row.iter().map(|&(b, u)| t[i * d + b] * u.conj()).sum();
            }
        }
    }

    /// Average of `P ρ P` over the 15 non-identity Paulis on `(a, b)`, mixed with weight `p`.
    fn depolarize(&mut self, a: usize, b: usize, p: f64) {
        let d = self.dim;
        let mut acc = vec![C64::new(0.0, 0.0); d * d];
        for k in 1..16 {
            let (pa, pb) = (Pauli::ALL[k & 3], Pauli::ALL[k >> 2]);
            let act = |i: usize| -> (usize, C64) {
                let mut out = i;
                let mut ph = C64::new(1.0, 0.0);
                for (q, pauli) in [(a, pa), (b, pb)] {
                    let bit = (i >> q) & 1;
                    let m = pauli.matrix();
                    let row = if pauli.flips() { bit ^ 1 } else { bit };
                    ph *= m[row * 2 + bit];
                    out = (out & !(1 << q)) | (row << q);
                }
                (out, ph)
            };
            for i in 0..d {
                let (pi, phi) = act(i);
                for j in 0..d {
                    let (pj, phj) = act(j);
                    acc[pi * d + pj] += phi * self.rho[i * d + j] * phj.conj();
                }
            }
        }
        for (r, s) in self.rho.iter_mut().zip(acc) {
            *r = *r * (1.0 - p) + s * (p / 15.0);
        }
    }

    fn expectation(&self, o: &PauliTermSum) -> f64 {
        let d = self.dim;
        let op = o.to_dense().unwrap();
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                tr += op[(i, j)] * self.rho[j * d + i];
            }
        }
        tr.re
    }
}

/// Noisy `⟨O⟩` with depolarizing `p2` after every two-qubit gate, as in the
/// trajectory model with `p1 = 0` and ideal readout.
fn exact_noisy(c: &QuantumCircuit, o: &PauliTermSum, p2: f64) -> f64 {
    let n = c.num_qubits();
    let mut rho = Density::zero_state(n);
    for g in c.gates() {
        if g.kind() == GateKind::Barrier {
            continue;
        }
        let mut single = QuantumCircuit::new(n);
        single.push(*g).unwrap();
        let u = circuit_unitary(&single).unwrap();
        let rows: Vec<Vec<(usize, C64)>> = (0..rho.dim)
            .map(|i| (0..rho.dim).filter(|&a| u[(i, a)].norm() > 0.0).map(|a| (a, u[(i, a)])).collect())
            .collect();
        rho.conjugate(&rows);
        if g.is_two_qubit() {
            rho.depolarize(g.qubits()[0], g.qubits()[1], p2);
        }
    }
    rho.expectation(o)
}

fn setup() -> (QuantumCircuit, PauliTermSum, f64) {
    let plan = TrotterPlan::new(TrotterOrder::First, 4, 0.25, HubbardParams::new(4, 1.0, 1.0)).with_neel_preparation();
    let c = decompose_to_basis(&build_circuit(&plan).unwrap()).unwrap();
    let o = neel_operator(4).unwrap();
    let mut psi = StateVector::zeros(8).unwrap();
    psi.apply_circuit(&c).unwrap();
    let ideal = psi.expectation(&o).unwrap();
    (c, o, ideal)
}

const P2: f64 = 2.5e-3;

#[test]
fn trajectory_sampler_matches_channel() {
    let (c, o, ideal) = setup();
    let noise = NoiseModel { p1: 0.0, p2: P2, p01: 0.0, p10: 0.0, readout: None };
    let exact = exact_noisy(&c, &o, P2);
    assert!((exact_noisy(&c, &o, 0.0) - ideal).abs() < 1e-12);
    let shots = 200_000;
    let sampled = noisy_expectation(&c, &o, &noise, ExecOptions { shots, shots_per_trajectory: 50 }, 11).unwrap();
    // |O| ≤ 1 per group of diagonal terms; trajectories add correlation, so allow 5 standard errors
    let se = 2.0 / (shots as f64).sqrt() * 50f64.sqrt();
    assert!((sampled - exact).abs() < 5.0 * se, "sampled {sampled}, channel {exact}, se {se}");
}

/// Exact fold values do not attenuate by one constant factor per fold, so
/// the exponential fit carries a model error of a few percent here. It still
/// beats the raw value and the linear fit.
#[test]
fn exponential_zne_on_exact_attenuation() {
    let (c, o, ideal) = setup();
    let factors = [1, 3, 5];
    let raw: Vec<f64> = factors.iter().map(|&k| exact_noisy(&fold_cz(&c, k).unwrap(), &o, P2)).collect();
    let exp = extrapolate(&factors, &raw, ZneFit::Exponential).unwrap().value;
    let lin = extrapolate(&factors, &raw, ZneFit::Linear).unwrap().value;
    let rel = |v: f64| (v - ideal).abs() / ideal.abs();
    let (l1, l2) = (raw[1] / raw[0], raw[2] / raw[1]);
    eprintln!(
        "ideal {ideal:.6} raw {raw:?} per-fold attenuation {l1:.4} / {l2:.4}; exponential {exp:.6} ({:.4}), linear {lin:.6} ({:.4})",
        rel(exp),
        rel(lin)
    );
    assert!(l1 > 0.0 && l2 > 0.0 && l1 < 1.0 && l2 < 1.0);
    assert!(rel(exp) < rel(lin) && rel(exp) < rel(raw[0]));
}
