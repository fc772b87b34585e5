//! Dense statevector backend.
//!
//! Amplitude `k` belongs to the basis state whose qubit `q` is bit `q` of `k`.
//! Gate kernels work in place; arrays of at least `2^PAR_QUBITS` amplitudes
//! are processed in parallel chunks.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind, GateMatrix, QuantumCircuit};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::model::{i_pow, BasisState, PauliString, PauliTermSum};
use crate::tolerance;

/// Hard memory ceiling; callers usually enforce a lower configured cap.
pub const MAX_QUBITS: usize = 30;

/// Largest width accepted by the raw amplitude dump.
pub const MAX_DUMP_QUBITS: usize = 20;

const PAR_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn chunks_apply(amps: &mut [C64], chunk: usize, f: impl Fn(&mut [C64]) + Sync + Send) {
    if amps.len() >= 1 << PAR_QUBITS {
        amps.par_chunks_mut(chunk).for_each(f);
    } else {
        amps.chunks_mut(chunk).for_each(f);
    }
}

fn mat2(m: &[C64; 4], a: C64, b: C64) -> (C64, C64) {
    (m[0] * a + m[1] * b, m[2] * a + m[3] * b)
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity { backend: "statevector", width: n, cap: MAX_QUBITS });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { num_qubits: n, amps })
    }

    pub fn from_basis(state: &BasisState) -> Result<Self> {
        let mut s = Self::zeros(state.num_qubits())?;
        s.amps[0] = ZERO;
        s.amps[state.index()] = ONE;
        Ok(s)
    }

    /// Takes ownership of raw amplitudes; the length must be a power of two
    /// and the norm one.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::Capacity { backend: "statevector", width: n, cap: MAX_QUBITS });
        }
        let s = Self { num_qubits: n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > tolerance::NORM {
            return Err(Error::Numerical(format!("state norm {norm} is not one")));
        }
        Ok(s)
    }

    /// Wrap amplitudes without the norm check; the length must be `2^n`.
    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn norm_sqr(&self) -> f64 {
        if self.amps.len() >= 1 << PAR_QUBITS {
            self.amps.par_iter().map(|z| z.norm_sqr()).sum()
        } else {
            self.amps.iter().map(|z| z.norm_sqr()).sum()
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_width(other.num_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual: n });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: q, width: self.num_qubits });
        }
        Ok(())
    }

    /// Apply a 2×2 row-major unitary to qubit `q`.
    pub fn apply_one(&mut self, q: usize, m: &[C64; 4]) -> Result<()> {
        self.check_qubit(q)?;
        let half = 1 << q;
        let m = *m;
        if m[1] == ZERO && m[2] == ZERO {
            return self.apply_diagonal(|i| if i >> q & 1 == 0 { m[0] } else { m[3] });
        }
        chunks_apply(&mut self.amps, 2 * half, |c| {
            let (lo, hi) = c.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = mat2(&m, *a, *b);
                *a = x;
                *b = y;
            }
        });
        Ok(())
    }

    /// Apply a 4×4 row-major unitary to `(q0, q1)`; local index is
    /// `bit(q0) + 2 * bit(q1)`.
    pub fn apply_two(&mut self, q0: usize, q1: usize, m: &[C64; 16]) -> Result<()> {
        self.check_qubit(q0)?;
        self.check_qubit(q1)?;
        if q0 == q1 {
            return Err(Error::InvalidParameter(format!("two-qubit gate on repeated qubit {q0}")));
        }
        let diagonal = (0..4).all(|r| (0..4).all(|c| r == c || m[r * 4 + c] == ZERO));
        if diagonal {
            let d = [m[0], m[5], m[10], m[15]];
            return self.apply_diagonal(|i| d[(i >> q0 & 1) | (i >> q1 & 1) << 1]);
        }
        let (lo, hi) = (q0.min(q1), q0.max(q1));
        let low_is_q0 = lo == q0;
        let m = *m;
        chunks_apply(&mut self.amps, 2 << hi, |c| {
            let (h0, h1) = c.split_at_mut(1 << hi);
            for (s0, s1) in h0.chunks_mut(2 << lo).zip(h1.chunks_mut(2 << lo)) {
                let (a00, a10) = s0.split_at_mut(1 << lo);
                let (a01, a11) = s1.split_at_mut(1 << lo);
                // aXY: X = low bit, Y = high bit
                for k in 0..a00.len() {
                    let v = if low_is_q0 {
                        [a00[k], a10[k], a01[k], a11[k]]
                    } else {
                        [a00[k], a01[k], a10[k], a11[k]]
                    };
                    let mut w = [ZERO; 4];
                    for (r, wr) in w.iter_mut().enumerate() {
                        *wr = m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
                    }
                    if low_is_q0 {
                        (a00[k], a10[k], a01[k], a11[k]) = (w[0], w[1], w[2], w[3]);
                    } else {
                        (a00[k], a01[k], a10[k], a11[k]) = (w[0], w[1], w[2], w[3]);
                    }
                }
            }
        });
        Ok(())
    }

    fn apply_diagonal(&mut self, phase: impl Fn(usize) -> C64 + Sync) -> Result<()> {
        if self.amps.len() >= 1 << PAR_QUBITS {
            self.amps.par_iter_mut().enumerate().for_each(|(i, z)| *z *= phase(i));
        } else {
            self.amps.iter_mut().enumerate().for_each(|(i, z)| *z *= phase(i));
        }
        Ok(())
    }

    fn swap_bits(&mut self, a: usize, b: usize, cond: Option<usize>) {
        // exchange amplitudes of index pairs differing in bits a and b
        // (a set, b clear) <-> (a clear, b set); with `cond`, only where that bit is set
        let n = self.amps.len();
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..n {
            if i & ma != 0 && i & mb == 0 && cond.is_none_or(|c| i >> c & 1 == 1) {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.num_qubits)?;
        let q = g.qubits();
        match g.kind() {
            GateKind::Barrier => Ok(()),
            GateKind::X => {
                let half = 1 << q[0];
                chunks_apply(&mut self.amps, 2 * half, |c| {
                    let (lo, hi) = c.split_at_mut(half);
                    lo.swap_with_slice(hi);
                });
                Ok(())
            }
            GateKind::CNOT if self.amps.len() < 1 << PAR_QUBITS => {
                let (c, t) = (q[0], q[1]);
                let (mc, mt) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
                Ok(())
            }
            GateKind::SWAP if self.amps.len() < 1 << PAR_QUBITS => {
                self.swap_bits(q[0], q[1], None);
                Ok(())
            }
            _ => match g.matrix().expect("non-barrier gate has a matrix") {
                GateMatrix::One(m) => self.apply_one(q[0], &m),
                GateMatrix::Two(m) => self.apply_two(q[0], q[1], &m),
            },
        }
    }

    pub fn apply_circuit(&mut self, c: &QuantumCircuit) -> Result<()> {
        self.check_width(c.num_qubits())?;
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Apply a Pauli string as an operator.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_width(p.len())?;
        let (flip, sign, ny) = p.masks();
        let (flip, sign) = (flip as usize, sign as usize);
        let phase = i_pow(ny);
        let old = std::mem::take(&mut self.amps);
        self.amps = (0..old.len())
            .map(|y| {
                let x = y ^ flip;
                let s = if (x & sign).count_ones() % 2 == 1 { -phase } else { phase };
                s * old[x]
            })
            .collect();
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for a single Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<C64> {
        self.check_width(p.len())?;
        let (flip, sign, ny) = p.masks();
        let (flip, sign) = (flip as usize, sign as usize);
        let term = |x: usize| {
            let v = self.amps[x ^ flip].conj() * self.amps[x];
            if (x & sign).count_ones() % 2 == 1 {
                -v
            } else {
                v
            }
        };
        let total: C64 = if self.amps.len() >= 1 << PAR_QUBITS {
            (0..self.amps.len()).into_par_iter().map(term).sum()
        } else {
            (0..self.amps.len()).map(term).sum()
        };
        Ok(i_pow(ny) * total)
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian Pauli sum.
    pub fn expectation(&self, o: &PauliTermSum) -> Result<f64> {
        self.check_width(o.num_qubits())?;
        let mut total = ZERO;
        for (c, p) in o.terms() {
            total += *c * self.pauli_expectation(p)?;
        }
        if total.im.abs() > tolerance::IMAG_RESIDUE {
            return Err(Error::Numerical(format!("imaginary residue {} in expectation value", total.im)));
        }
        Ok(total.re)
    }

    /// Draw `shots` computational-basis samples, optionally passed through a
    /// readout flip channel.
    pub fn sample_counts<R: Rng>(&self, shots: u64, readout: Option<&ReadoutNoise>, rng: &mut R) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::InvalidParameter("at least one shot required".into()));
        }
        if let Some(r) = readout {
            self.check_width(r.num_qubits())?;
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for z in &self.amps {
            acc += z.norm_sqr();
            cdf.push(acc);
        }
        let mut hist = Histogram::new(self.num_qubits);
        for _ in 0..shots {
            let u = rng.random::<f64>() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            let k = match readout {
                Some(r) => r.corrupt(k as u64, rng) as usize,
                None => k,
            };
            hist.record(k as u64, 1);
        }
        Ok(hist)
    }

    /// Raw dump: little-endian `f64` pairs `(re, im)` in index order.
    pub fn write_amplitudes<W: Write>(&self, mut w: W) -> Result<()> {
        if self.num_qubits > MAX_DUMP_QUBITS {
            return Err(Error::Capacity { backend: "amplitude dump", width: self.num_qubits, cap: MAX_DUMP_QUBITS });
        }
        let mut buf = Vec::with_capacity(self.amps.len() * 16);
        for z in &self.amps {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_amplitudes<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() % 16 != 0 {
            return Err(Error::Parse(format!("amplitude dump length {} is not a multiple of 16", buf.len())));
        }
        let amps = buf
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                C64::new(re, im)
            })
            .collect();
        Self::from_amplitudes(amps)
    }
}

/// Single-amplitude state for a computational basis state.
pub fn init_basis(state: &BasisState) -> Result<StateVector> {
    StateVector::from_basis(state)
}

/// Per-qubit asymmetric readout flips: `p01` is the probability of reading 1
/// when the qubit is 0, `p10` of reading 0 when it is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNoise {
    p01: Vec<f64>,
    p10: Vec<f64>,
}

impl ReadoutNoise {
    pub fn new(p01: Vec<f64>, p10: Vec<f64>) -> Result<Self> {
        if p01.len() != p10.len() {
            return Err(Error::WidthMismatch { expected: p01.len(), actual: p10.len() });
        }
        if let Some(p) = p01.iter().chain(&p10).find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!("flip probability {p} outside [0, 1]")));
        }
        Ok(Self { p01, p10 })
    }

    pub fn uniform(n: usize, p01: f64, p10: f64) -> Result<Self> {
        Self::new(vec![p01; n], vec![p10; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.p01.len()
    }

    pub fn p01(&self, q: usize) -> f64 {
        self.p01[q]
    }

    pub fn p10(&self, q: usize) -> f64 {
        self.p10[q]
    }

    pub fn is_trivial(&self) -> bool {
        self.p01.iter().chain(&self.p10).all(|&p| p == 0.0)
    }

    /// Pass one measured bitstring through the flip channel.
    pub fn corrupt<R: Rng>(&self, mut bits: u64, rng: &mut R) -> u64 {
        for q in 0..self.p01.len() {
            let p = if bits >> q & 1 == 0 { self.p01[q] } else { self.p10[q] };
            if p > 0.0 && rng.random::<f64>() < p {
                bits ^= 1 << q;
            }
        }
        bits
    }
}

/// Measured bitstring counts keyed by basis index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    num_qubits: usize,
    counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, counts: BTreeMap::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn record(&mut self, index: u64, count: u64) {
        *self.counts.entry(index).or_insert(0) += count;
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn get(&self, index: u64) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Bit string of an index, qubit 0 first.
    pub fn bitstring(&self, index: u64) -> String {
        (0..self.num_qubits).map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// Mean of `(-1)^{popcount(x & mask)}` over the samples.
    pub fn parity_mean(&self, mask: u64) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let signed: i64 = self
            .counts
            .iter()
            .map(|(&k, &c)| if (k & mask).count_ones().is_multiple_of(2) { c as i64 } else { -(c as i64) })
            .sum();
        signed as f64 / total as f64
    }

    /// Sample estimate of a diagonal observable.
    pub fn diagonal_expectation(&self, o: &PauliTermSum) -> Result<f64> {
        if o.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual: o.num_qubits() });
        }
        if !o.is_diagonal() {
            return Err(Error::NonDiagonalObservable);
        }
        Ok(o.terms().iter().map(|(c, p)| c * self.parity_mean(p.masks().1)).sum())
    }

    /// CSV with header `bitstring,count`, one row per observed outcome.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (&k, &c) in &self.counts {
            out.push_str(&format!("{},{}\n", self.bitstring(k), c));
        }
        out
    }
}
