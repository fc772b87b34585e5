//! Matrix-product-state backend with one tensor per qubit.
//!
//! Tensors are stored as `(left, physical, right)` with the right bond
//! fastest. Two-qubit gates act on neighbouring qubits only; consecutive
//! gates on the same pair (and single-qubit gates on either member) are
//! multiplied into one 4×4 block before the single SVD that re-splits the
//! pair. Truncation keeps the smallest rank whose discarded weight stays
//! within the cutoff, then applies the bond cap, and renormalises.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateMatrix, QuantumCircuit};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};
use crate::model::{BasisState, Pauli, PauliTermSum};

/// Relative weight below which discarded singular values count as exact
/// zeros, so a zero cutoff does not keep rounding noise.
pub const ZERO_WEIGHT: f64 = 1e-24;

type OperatorString = Vec<Option<[C64; 4]>>;

/// Cutoffs at or above this truncate through the reduced density matrix;
/// smaller ones use the SVD so that exact ranks are resolved.
pub const GRAM_CUTOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
struct Tensor {
    left: usize,
    right: usize,
    data: Vec<C64>,
}

impl Tensor {
    fn at(&self, a: usize, s: usize, b: usize) -> C64 {
        self.data[(a * 2 + s) * self.right + b]
    }

    /// `(left·2) × right` view.
    fn as_left_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.left * 2, self.right, &self.data)
    }

    /// `left × (2·right)` view.
    fn as_right_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.left, 2 * self.right, &self.data)
    }

    fn from_row_major(left: usize, right: usize, m: &DMatrix<C64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Self { left, right, data }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpsState {
    tensors: Vec<Tensor>,
    center: usize,
    chi_max: usize,
    cutoff: f64,
}

/// One SVD split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub step: u32,
    pub link: usize,
    pub eps: f64,
    pub chi: usize,
}

/// Maxima over one circuit segment (one Trotter step).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub step: u32,
    pub max_link_dim: usize,
    pub max_trunc_err: f64,
    pub discarded_weight: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationLog {
    pub records: Vec<TruncationRecord>,
    pub sweeps: Vec<SweepSummary>,
}

impl TruncationLog {
    pub fn extend(&mut self, other: TruncationLog) {
        self.records.extend(other.records);
        self.sweeps.extend(other.sweeps);
    }

    /// Sum of discarded weights over all splits.
    pub fn cumulative_discarded(&self) -> f64 {
        self.records.iter().map(|r| r.eps).sum()
    }

    pub fn max_trunc_err(&self) -> f64 {
        self.records.iter().map(|r| r.eps).fold(0.0, f64::max)
    }

    /// CSV with header `step,link,eps,chi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,link,eps,chi\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{:e},{}\n", r.step, r.link, r.eps, r.chi));
        }
        out
    }
}

fn matmul4(a: &[C64; 16], b: &[C64; 16]) -> [C64; 16] {
    let mut out = [ZERO; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = (0..4).map(|k| a[i * 4 + k] * b[k * 4 + j]).sum();
        }
    }
    out
}

/// 4×4 form of a single-qubit matrix acting on local bit `pos`.
fn embed_one(m: &[C64; 4], pos: usize) -> [C64; 16] {
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            let other = 1 - pos;
            if (r >> other & 1) == (c >> other & 1) {
                out[r * 4 + c] = m[(r >> pos & 1) * 2 + (c >> pos & 1)];
            }
        }
    }
    out
}

/// Exchange the roles of the two local bits.
fn swap_local(m: &[C64; 16]) -> [C64; 16] {
    let p = |i: usize| (i & 1) << 1 | (i >> 1);
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[p(r) * 4 + p(c)] = m[r * 4 + c];
        }
    }
    out
}

/// Product state for a computational basis state.
pub fn mps_from_basis(state: &BasisState, chi_max: usize, cutoff: f64) -> Result<MpsState> {
    if chi_max == 0 {
        return Err(Error::InvalidParameter("bond cap must be positive".into()));
    }
    if !(0.0..1.0).contains(&cutoff) {
        return Err(Error::InvalidParameter(format!("truncation cutoff {cutoff} outside [0, 1)")));
    }
    let tensors = state
        .bits()
        .iter()
        .map(|&b| Tensor { left: 1, right: 1, data: if b { vec![ZERO, ONE] } else { vec![ONE, ZERO] } })
        .collect();
    Ok(MpsState { tensors, center: 0, chi_max, cutoff })
}

impl MpsState {
    pub fn num_qubits(&self) -> usize {
        self.tensors.len()
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Bond dimensions of the `N - 1` internal links.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors.iter().skip(1).map(|t| t.left).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits() {
            return Err(Error::QubitOutOfRange { index: q, width: self.num_qubits() });
        }
        Ok(())
    }

    fn move_center(&mut self, target: usize) {
        while self.center < target {
            let i = self.center;
            let t = &self.tensors[i];
            let qr = t.as_left_matrix().qr();
            let (q, r) = (qr.q(), qr.r());
            let k = q.ncols();
            let left = t.left;
            self.tensors[i] = Tensor::from_row_major(left, k, &q);
            let next = &self.tensors[i + 1];
            let merged = r * next.as_right_matrix();
            let right = next.right;
            self.tensors[i + 1] = Tensor::from_row_major(k, right, &merged);
            self.center += 1;
        }
        while self.center > target {
            let i = self.center;
            let t = &self.tensors[i];
            let qr = t.as_right_matrix().adjoint().qr();
            let (q, r) = (qr.q(), qr.r());
            let k = q.ncols();
            let right = t.right;
            self.tensors[i] = Tensor::from_row_major(k, right, &q.adjoint());
            let prev = &self.tensors[i - 1];
            let merged = prev.as_left_matrix() * r.adjoint();
            let left = prev.left;
            self.tensors[i - 1] = Tensor::from_row_major(left, k, &merged);
            self.center -= 1;
        }
    }

    fn apply_single(&mut self, q: usize, m: &[C64; 4]) {
        let t = &mut self.tensors[q];
        let r = t.right;
        for a in 0..t.left {
            for b in 0..r {
                let x0 = t.data[(a * 2) * r + b];
                let x1 = t.data[(a * 2 + 1) * r + b];
                t.data[(a * 2) * r + b] = m[0] * x0 + m[1] * x1;
                t.data[(a * 2 + 1) * r + b] = m[2] * x0 + m[3] * x1;
            }
        }
    }

    /// Apply a 4×4 block to `(i, i+1)` with local index `bit(i) + 2·bit(i+1)`.
    fn apply_pair(&mut self, i: usize, g: &[C64; 16], step: u32) -> Result<TruncationRecord> {
        self.move_center(i);
        let (a_t, b_t) = (&self.tensors[i], &self.tensors[i + 1]);
        let (l, r) = (a_t.left, b_t.right);
        // theta[(a, s1), (s2, b)]
        let theta = a_t.as_left_matrix() * b_t.as_right_matrix();
        let mut out = DMatrix::<C64>::zeros(2 * l, 2 * r);
        for a in 0..l {
            for b in 0..r {
                let v = [
                    theta[(2 * a, b)],
                    theta[(2 * a + 1, b)],
                    theta[(2 * a, r + b)],
                    theta[(2 * a + 1, r + b)],
                ];
                for (row, dst) in [(0, (2 * a, b)), (1, (2 * a + 1, b)), (2, (2 * a, r + b)), (3, (2 * a + 1, r + b))] {
                    out[dst] = (0..4).map(|k| g[row * 4 + k] * v[k]).sum();
                }
            }
        }
        let (left, right, eps, center) =
            if self.cutoff >= GRAM_CUTOFF { self.split_gram(&out, i)? } else { self.split_svd(&out, i)? };
        let keep = left.ncols();
        self.tensors[i] = Tensor::from_row_major(l, keep, &left);
        // right matrix is indexed (j, s2·r + b), matching (left, phys, right) layout
        self.tensors[i + 1] = Tensor::from_row_major(keep, r, &right);
        self.center = center;
        Ok(TruncationRecord { step, link: i, eps, chi: keep })
    }

    /// Number of values kept from descending `weights` and the discarded
    /// relative weight.
    fn truncation(&self, weights: &[f64], link: usize) -> Result<(usize, f64)> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numerical(format!("vanishing state norm at link {link}")));
        }
        // tail[k] = relative weight discarded when keeping k values
        let mut tail = vec![0.0; weights.len() + 1];
        for k in (0..weights.len()).rev() {
            tail[k] = tail[k + 1] + weights[k] / total;
        }
        let allowed = self.cutoff.max(ZERO_WEIGHT);
        let keep = (1..=weights.len()).find(|&k| tail[k] <= allowed).unwrap_or(weights.len());
        let keep = keep.min(self.chi_max).max(1);
        Ok((keep, tail[keep]))
    }

    fn split_svd(&self, out: &DMatrix<C64>, link: usize) -> Result<(DMatrix<C64>, DMatrix<C64>, f64, usize)> {
        let svd = linalg::svd(out);
        let mut order: Vec<usize> = (0..svd.s.len()).collect();
        order.sort_by(|&x, &y| svd.s[y].total_cmp(&svd.s[x]));
        let weights: Vec<f64> = order.iter().map(|&k| svd.s[k].powi(2)).collect();
        let (keep, eps) = self.truncation(&weights, link)?;
        let kept_norm = weights[..keep].iter().sum::<f64>().sqrt();
        let mut left = DMatrix::<C64>::zeros(out.nrows(), keep);
        let mut right = DMatrix::<C64>::zeros(keep, out.ncols());
        for (j, &k) in order.iter().take(keep).enumerate() {
            left.set_column(j, &svd.u.column(k));
            right.set_row(j, &(svd.v_t.row(k) * C64::new(svd.s[k] / kept_norm, 0.0)));
        }
        Ok((left, right, eps, link + 1))
    }

    /// Truncation through the eigenbasis of the smaller reduced density
    /// matrix. The kept factor is the exact projection of the block.
    fn split_gram(&self, out: &DMatrix<C64>, link: usize) -> Result<(DMatrix<C64>, DMatrix<C64>, f64, usize)> {
        let from_left = out.nrows() <= out.ncols();
        let rho = if from_left { out * out.adjoint() } else { out.adjoint() * out };
        let dim = rho.nrows();
        let eig = rho.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let weights: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        let (keep, _) = self.truncation(&weights, link)?;
        let mut basis = DMatrix::<C64>::zeros(dim, keep);
        for (j, &k) in order.iter().take(keep).enumerate() {
            basis.set_column(j, &eig.eigenvectors.column(k));
        }
        let total = out.norm_squared();
        if from_left {
            let mut right = basis.adjoint() * out;
            let kept = right.norm_squared();
            right /= C64::new(kept.sqrt(), 0.0);
            Ok((basis, right, (1.0 - kept / total).max(0.0), link + 1))
        } else {
            let mut left = out * &basis;
            let kept = left.norm_squared();
            left /= C64::new(kept.sqrt(), 0.0);
            Ok((left, basis.adjoint(), (1.0 - kept / total).max(0.0), link))
        }
    }

    fn flush(&mut self, pending: &mut Option<(usize, [C64; 16])>, step: u32, log: &mut TruncationLog) -> Result<()> {
        if let Some((i, m)) = pending.take() {
            log.records.push(self.apply_pair(i, &m, step)?);
        }
        Ok(())
    }

    /// Apply every gate of `c`. Each tag segment is logged as one sweep.
    pub fn apply_circuit(&mut self, c: &QuantumCircuit) -> Result<TruncationLog> {
        if c.num_qubits() != self.num_qubits() {
            return Err(Error::WidthMismatch { expected: self.num_qubits(), actual: c.num_qubits() });
        }
        for g in c.gates().iter().filter(|g| g.is_two_qubit()) {
            let q = g.qubits();
            if q[0].abs_diff(q[1]) != 1 {
                return Err(Error::NonAdjacentGate(q[0], q[1]));
            }
        }
        let mut log = TruncationLog::default();
        for (step, gates) in c.segments() {
            let start = Instant::now();
            let first = log.records.len();
            let mut pending: Option<(usize, [C64; 16])> = None;
            for g in gates {
                self.fuse(g, &mut pending, step, &mut log)?;
            }
            self.flush(&mut pending, step, &mut log)?;
            let recs = &log.records[first..];
            log.sweeps.push(SweepSummary {
                step,
                max_link_dim: self.max_bond_dim(),
                max_trunc_err: recs.iter().map(|r| r.eps).fold(0.0, f64::max),
                discarded_weight: recs.iter().map(|r| r.eps).sum(),
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        Ok(log)
    }

    fn fuse(&mut self, g: &Gate, pending: &mut Option<(usize, [C64; 16])>, step: u32, log: &mut TruncationLog) -> Result<()> {
        for &q in g.qubits() {
            self.check_qubit(q)?;
        }
        match g.matrix() {
            None => Ok(()),
            Some(GateMatrix::One(m)) => {
                let q = g.qubits()[0];
                match pending {
                    Some((i, acc)) if q == *i || q == *i + 1 => {
                        *acc = matmul4(&embed_one(&m, q - *i), acc);
                    }
                    _ => self.apply_single(q, &m),
                }
                Ok(())
            }
            Some(GateMatrix::Two(m)) => {
                let q = g.qubits();
                let lo = q[0].min(q[1]);
                let local = if q[0] == lo { m } else { swap_local(&m) };
                match pending {
                    Some((i, acc)) if *i == lo => {
                        *acc = matmul4(&local, acc);
                    }
                    _ => {
                        self.flush(pending, step, log)?;
                        *pending = Some((lo, local));
                    }
                }
                Ok(())
            }
        }
    }

    fn single_site_ops(&self, letters: &[Pauli]) -> Vec<Option<[C64; 4]>> {
        letters.iter().map(|&p| if p == Pauli::I { None } else { Some(p.matrix()) }).collect()
    }

    /// `⟨ψ|O|ψ⟩` by exact contraction of each term.
    pub fn expectation(&self, o: &PauliTermSum) -> Result<f64> {
        if o.num_qubits() != self.num_qubits() {
            return Err(Error::WidthMismatch { expected: self.num_qubits(), actual: o.num_qubits() });
        }
        // (first site, last site, coefficient, per-site operator; None is identity)
        let mut terms: Vec<(usize, usize, f64, OperatorString)> = Vec::new();
        let mut constant = 0.0;
        for (c, p) in o.terms() {
            let support: Vec<usize> = p.support().collect();
            match (support.first(), support.last()) {
                (Some(&lo), Some(&hi)) => terms.push((lo, hi, *c, self.single_site_ops(p.letters()))),
                _ => constant += c,
            }
        }
        terms.sort_by_key(|t| t.0);
        let mut work = self.clone();
        let mut total = C64::new(constant * self.norm_sqr(), 0.0);
        for (lo, hi, c, ops) in terms {
            work.move_center(lo);
            let mut env = DMatrix::<C64>::identity(work.tensors[lo].left, work.tensors[lo].left);
            for (site, op) in ops.iter().enumerate().take(hi + 1).skip(lo) {
                env = transfer(&env, &work.tensors[site], op.as_ref());
            }
            total += c * env.trace();
        }
        if total.im.abs() > crate::tolerance::IMAG_RESIDUE {
            return Err(Error::Numerical(format!("imaginary residue {} in expectation value", total.im)));
        }
        Ok(total.re)
    }

    pub fn norm_sqr(&self) -> f64 {
        let t = &self.tensors[self.center];
        t.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Dense amplitudes (qubit 0 least significant). Intended for checks on
    /// small widths.
    pub fn to_amplitudes(&self) -> Result<Vec<C64>> {
        let n = self.num_qubits();
        if n > crate::statevector::MAX_DUMP_QUBITS {
            return Err(Error::Capacity { backend: "mps contraction", width: n, cap: crate::statevector::MAX_DUMP_QUBITS });
        }
        // rows: basis index over processed qubits; cols: right bond
        let mut acc = vec![ONE];
        let mut width = 1;
        for (q, t) in self.tensors.iter().enumerate() {
            let r = t.right;
            let mut next = vec![ZERO; (1 << (q + 1)) * r];
            for x in 0..1usize << q {
                for s in 0..2 {
                    let y = x | s << q;
                    for b in 0..r {
                        next[y * r + b] = (0..t.left).map(|a| acc[x * width + a] * t.at(a, s, b)).sum();
                    }
                }
            }
            acc = next;
            width = r;
        }
        Ok(acc)
    }
}

/// `E'[b, b'] = Σ conj(A[a,s,b]) O[s,s'] E[a,a'] A[a',s',b']`.
fn transfer(env: &DMatrix<C64>, t: &Tensor, op: Option<&[C64; 4]>) -> DMatrix<C64> {
    let (l, r) = (t.left, t.right);
    // EA[a, (s', b')] = Σ_a' E[a, a'] A[a', s', b']
    let ea = env * t.as_right_matrix();
    let mut out = DMatrix::<C64>::zeros(r, r);
    for s in 0..2 {
        for sp in 0..2 {
            let w = match op {
                None => {
                    if s == sp {
                        ONE
                    } else {
                        continue;
                    }
                }
                Some(m) => m[s * 2 + sp],
            };
            if w == ZERO {
                continue;
            }
            for a in 0..l {
                for b in 0..r {
                    let x = t.at(a, s, b).conj() * w;
                    if x == ZERO {
                        continue;
                    }
                    for bp in 0..r {
                        out[(b, bp)] += x * ea[(a, sp * r + bp)];
                    }
                }
            }
        }
    }
    out
}

/// Apply a circuit; returns the truncation log.
pub fn apply_circuit_mps(m: &mut MpsState, c: &QuantumCircuit) -> Result<TruncationLog> {
    m.apply_circuit(c)
}

pub fn expectation_mps(m: &MpsState, o: &PauliTermSum) -> Result<f64> {
    m.expectation(o)
}
