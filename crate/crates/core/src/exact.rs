//! Reference continuous-time evolution `exp(-i H τ)|ψ⟩`.
//!
//! The Hamiltonian is never materialised: Pauli terms are grouped by their
//! bit-flip mask and applied in gather form, one output amplitude at a time.
//! Propagation uses a Lanczos approximation of the exponential with adaptive
//! substeps. Each substep runs the Lanczos recurrence twice, first keeping
//! only the tridiagonal coefficients and then regenerating the basis to form
//! the result, so memory stays at a few state vectors regardless of the
//! Krylov dimension.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::model::{i_pow, PauliTermSum};
use crate::statevector::{StateVector, MAX_QUBITS};
use crate::tolerance;

const PAR_LEN: usize = 1 << 12;

#[derive(Clone, Debug)]
struct FlipGroup {
    flip: usize,
    /// `(sign mask, i^{n_y} · coefficient)`
    terms: Vec<(usize, C64)>,
}

/// Matrix-free Pauli-sum Hamiltonian. Identity terms are dropped at
/// construction and kept aside as [`SparseHamiltonian::offset`].
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    num_qubits: usize,
    groups: Vec<FlipGroup>,
    offset: f64,
}

impl SparseHamiltonian {
    pub fn new(h: &PauliTermSum) -> Result<Self> {
        let n = h.num_qubits();
        if n > MAX_QUBITS {
            return Err(Error::Capacity { backend: "exact", width: n, cap: MAX_QUBITS });
        }
        let mut groups: Vec<FlipGroup> = Vec::new();
        for (c, p) in h.without_identity().terms() {
            let (flip, sign, ny) = p.masks();
            let entry = (sign as usize, i_pow(ny) * *c);
            match groups.iter_mut().find(|g| g.flip == flip as usize) {
                Some(g) => g.terms.push(entry),
                None => groups.push(FlipGroup { flip: flip as usize, terms: vec![entry] }),
            }
        }
        groups.sort_by_key(|g| g.flip);
        Ok(Self { num_qubits: n, groups, offset: h.identity_coefficient() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Coefficient of the dropped identity term.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn row(&self, v: &[C64], y: usize) -> C64 {
        let mut acc = ZERO;
        for g in &self.groups {
            let x = y ^ g.flip;
            let mut phase = ZERO;
            for &(sign, c) in &g.terms {
                if (x & sign).count_ones() % 2 == 1 {
                    phase -= c;
                } else {
                    phase += c;
                }
            }
            acc += phase * v[x];
        }
        acc
    }

    /// `out = H v`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) -> Result<()> {
        let dim = 1usize << self.num_qubits;
        if v.len() != dim || out.len() != dim {
            let actual = v.len().max(out.len()).trailing_zeros() as usize;
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual });
        }
        if dim >= PAR_LEN {
            out.par_iter_mut().enumerate().for_each(|(y, o)| *o = self.row(v, y));
        } else {
            out.iter_mut().enumerate().for_each(|(y, o)| *o = self.row(v, y));
        }
        Ok(())
    }

    /// `H |ψ⟩` as raw amplitudes (not normalised).
    pub fn matvec(&self, psi: &StateVector) -> Result<Vec<C64>> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual: psi.num_qubits() });
        }
        let mut out = vec![ZERO; psi.amplitudes().len()];
        self.apply_into(psi.amplitudes(), &mut out)?;
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩` including the identity offset.
    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        let hv = self.matvec(psi)?;
        Ok(dot(psi.amplitudes(), &hv).re + self.offset)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    if a.len() >= PAR_LEN {
        a.par_iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

fn norm(a: &[C64]) -> f64 {
    dot(a, a).re.sqrt()
}

/// Krylov propagation settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub krylov_dim: usize,
    /// Target for the accumulated error estimate over the whole interval.
    pub tol: f64,
    /// Relative substep below which propagation is declared failed.
    pub min_step_fraction: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { krylov_dim: 30, tol: tolerance::KRYLOV_TOL, min_step_fraction: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KrylovReport {
    pub substeps: usize,
    pub matvecs: usize,
    pub error_estimate: f64,
}

/// Lanczos coefficients from `v0` (unit norm). Stops early on breakdown.
struct Tridiagonal {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Off-diagonal leaving the subspace; zero after breakdown.
    residual: f64,
}

struct Lanczos<'a> {
    h: &'a SparseHamiltonian,
    prev: Vec<C64>,
    cur: Vec<C64>,
    work: Vec<C64>,
    beta_prev: f64,
}

impl<'a> Lanczos<'a> {
    fn new(h: &'a SparseHamiltonian, v0: &[C64]) -> Self {
        Self { h, prev: vec![ZERO; v0.len()], cur: v0.to_vec(), work: vec![ZERO; v0.len()], beta_prev: 0.0 }
    }

    /// Advance one step; returns `(α_j, β_{j+1})` and leaves the next basis
    /// vector in `cur` unless β vanished.
    fn step(&mut self) -> Result<(f64, f64)> {
        self.h.apply_into(&self.cur, &mut self.work)?;
        let alpha = dot(&self.cur, &self.work).re;
        let (bp, a) = (self.beta_prev, alpha);
        let cur = &self.cur;
        let prev = &self.prev;
        let update = |(k, w): (usize, &mut C64)| *w -= a * cur[k] + bp * prev[k];
        if self.work.len() >= PAR_LEN {
            self.work.par_iter_mut().enumerate().for_each(update);
        } else {
            self.work.iter_mut().enumerate().for_each(update);
        }
        let beta = norm(&self.work);
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.work);
        if beta > 0.0 {
            let inv = 1.0 / beta;
            self.cur.iter_mut().for_each(|z| *z *= inv);
        }
        self.beta_prev = beta;
        Ok((alpha, beta))
    }
}

fn tridiagonal(h: &SparseHamiltonian, v0: &[C64], m: usize, scale: f64) -> Result<Tridiagonal> {
    let mut lz = Lanczos::new(h, v0);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    for _ in 0..m {
        let (a, b) = lz.step()?;
        alpha.push(a);
        if b <= 1e-13 * scale.max(1.0) {
            return Ok(Tridiagonal { alpha, beta, residual: 0.0 });
        }
        beta.push(b);
    }
    let residual = beta.pop().unwrap_or(0.0);
    Ok(Tridiagonal { alpha, beta, residual })
}

/// Coefficients of `exp(-i dt T) e_1` in the Lanczos basis.
fn small_exp(eig: &SymmetricEigen<f64, nalgebra::Dyn>, dt: f64) -> Vec<C64> {
    let q = &eig.eigenvectors;
    let m = q.nrows();
    let w: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, -dt * eig.eigenvalues[k]) * q[(0, k)]).collect();
    (0..m).map(|i| (0..m).map(|k| q[(i, k)] * w[k]).sum()).collect()
}

fn scale_of(h: &SparseHamiltonian) -> f64 {
    h.groups.iter().flat_map(|g| g.terms.iter()).map(|(_, c)| c.norm()).sum()
}

impl KrylovOptions {
    pub fn evolve(&self, h: &SparseHamiltonian, psi0: &StateVector, tau: f64) -> Result<(StateVector, KrylovReport)> {
        if psi0.num_qubits() != h.num_qubits {
            return Err(Error::WidthMismatch { expected: h.num_qubits, actual: psi0.num_qubits() });
        }
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("evolution time {tau} is not finite")));
        }
        if self.krylov_dim < 2 || self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("Krylov dimension ≥ 2 and positive tolerance required".into()));
        }
        let mut report = KrylovReport::default();
        let mut v = psi0.amplitudes().to_vec();
        if tau == 0.0 || h.groups.is_empty() {
            return Ok((psi0.clone(), report));
        }
        let scale = scale_of(h);
        let total = tau.abs();
        let dir = tau.signum();
        let mut done = 0.0;
        let mut trial = total.min(self.krylov_dim as f64 / (2.0 * scale));
        while done < total {
            let nv = norm(&v);
            let v0: Vec<C64> = v.iter().map(|z| z / nv).collect();
            let tri = tridiagonal(h, &v0, self.krylov_dim, scale)?;
            let m = tri.alpha.len();
            report.matvecs += m;
            let t = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    tri.alpha[i]
                } else if i.abs_diff(j) == 1 {
                    tri.beta[i.min(j)]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let remaining = total - done;
            let mut dt = if tri.residual == 0.0 { remaining } else { trial.min(remaining) };
            let coeffs = loop {
                let c = small_exp(&eig, dir * dt);
                let err = tri.residual * c[m - 1].norm();
                let budget = self.tol * dt / total;
                if err <= budget {
                    report.error_estimate += err;
                    // grow next trial step with the usual order heuristic
                    let grow = if err > 0.0 { 0.9 * (budget / err).powf(1.0 / m as f64) } else { 2.0 };
                    trial = dt * grow.clamp(1.0, 2.0);
                    break c;
                }
                dt *= (0.9 * (budget / err).powf(1.0 / m as f64)).clamp(0.1, 0.9);
                if dt < self.min_step_fraction * total {
                    return Err(Error::Numerical(format!(
                        "Krylov propagation stalled at τ = {} with dimension {}",
                        dir * done,
                        self.krylov_dim
                    )));
                }
            };
            // second pass: regenerate the basis and accumulate the result
            let mut lz = Lanczos::new(h, &v0);
            let mut out: Vec<C64> = v0.iter().map(|z| z * coeffs[0] * nv).collect();
            for &c in coeffs.iter().skip(1) {
                let (_, b) = lz.step()?;
                if b == 0.0 {
                    break;
                }
                let w = c * nv;
                let cur = &lz.cur;
                out.iter_mut().zip(cur).for_each(|(o, x)| *o += w * x);
            }
            report.matvecs += m - 1;
            report.substeps += 1;
            v = out;
            done += dt;
        }
        let state = StateVector::from_raw(psi0.num_qubits(), v);
        let drift = (state.norm() - psi0.norm()).abs();
        if drift > 1e-8 {
            return Err(Error::Numerical(format!("norm drift {drift} after Krylov propagation")));
        }
        Ok((state, report))
    }
}

/// `exp(-i H τ)|ψ0⟩` with accumulated error estimate at most `tol`.
pub fn evolve_exact(h: &SparseHamiltonian, psi0: &StateVector, tau: f64, tol: f64) -> Result<StateVector> {
    let opts = KrylovOptions { tol, ..KrylovOptions::default() };
    Ok(opts.evolve(h, psi0, tau)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_hermitian;
    use crate::model::{build_hamiltonian, neel_operator, neel_state, HubbardParams};
    use crate::statevector::init_basis;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..1 << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let v = random_vec(n, seed);
        let nv = norm(&v);
        StateVector::from_amplitudes(v.iter().map(|z| z / nv).collect()).unwrap()
    }

    #[test]
    fn diagonal_actions() {
        let p = HubbardParams::new(1, 1.0, 4.0);
        let h = SparseHamiltonian::new(&build_hamiltonian(&p).unwrap()).unwrap();
        let s = init_basis(&"11".parse().unwrap()).unwrap();
        let hv = h.matvec(&s).unwrap();
        // identity offset U/4 removed: U·n↑n↓ - U/4 on the doubly occupied state
        assert!((hv[3] - C64::new(4.0 - 1.0, 0.0)).norm() < 1e-14);
        assert!((h.energy(&s).unwrap() - 4.0).abs() < 1e-14);

        let p = HubbardParams::new(3, 1.0, 2.0);
        let full = build_hamiltonian(&p).unwrap();
        let h = SparseHamiltonian::new(&full.without_identity()).unwrap();
        let vac = StateVector::zeros(6).unwrap();
        let hv = h.matvec(&vac).unwrap();
        let lambda = hv[0];
        assert!(hv.iter().skip(1).all(|z| z.norm() < 1e-14));
        assert!((lambda.re + full.identity_coefficient()).abs() < 1e-12, "{lambda}");
    }

    #[test]
    fn matvec_matches_dense() {
        let p = HubbardParams::new(3, 0.7, 1.3).with_chemical_potential(0.2, -0.1);
        let ham = build_hamiltonian(&p).unwrap();
        let h = SparseHamiltonian::new(&ham).unwrap();
        let dense = ham.without_identity().to_dense().unwrap();
        let v = random_vec(6, 1);
        let mut out = vec![ZERO; 64];
        h.apply_into(&v, &mut out).unwrap();
        let expect = &dense * DVector::from_vec(v.clone());
        assert!(out.iter().zip(expect.iter()).all(|(a, b)| (a - b).norm() < 1e-11));

        let w = random_vec(6, 2);
        let mut hw = vec![ZERO; 64];
        h.apply_into(&w, &mut hw).unwrap();
        let lhs = dot(&v, &hw);
        let rhs = dot(&w, &out).conj();
        assert!((lhs - rhs).norm() < 1e-10);
        assert!(h.apply_into(&v[..32], &mut out).is_err());
    }

    #[test]
    fn stationary_single_site() {
        let h = SparseHamiltonian::new(&build_hamiltonian(&HubbardParams::new(1, 1.0, 1.0)).unwrap()).unwrap();
        let s = init_basis(&neel_state(1).unwrap()).unwrap();
        for tau in [0.3, 2.0] {
            let out = evolve_exact(&h, &s, tau, 1e-10).unwrap();
            assert!((out.expectation(&neel_operator(1).unwrap()).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn free_dimer_closed_form() {
        let h = SparseHamiltonian::new(&build_hamiltonian(&HubbardParams::new(2, 1.0, 0.0)).unwrap()).unwrap();
        let s = init_basis(&neel_state(2).unwrap()).unwrap();
        let obs = neel_operator(2).unwrap();
        for tau in [0.1, std::f64::consts::FRAC_PI_4, 1.0, 3.7] {
            let v = evolve_exact(&h, &s, tau, 1e-11).unwrap().expectation(&obs).unwrap();
            assert!((v - (2.0 * tau).cos() / 2.0).abs() < 1e-9, "τ={tau}: {v}");
        }
    }

    #[test]
    fn agrees_with_dense_exponential() {
        for (l, seed) in [(2, 3), (3, 4), (4, 5)] {
            let p = HubbardParams::new(l, 1.0, 2.5).with_chemical_potential(0.3, 0.1);
            let ham = build_hamiltonian(&p).unwrap().without_identity();
            let h = SparseHamiltonian::new(&ham).unwrap();
            let s = random_state(2 * l, seed);
            let tau = 1.7;
            let out = evolve_exact(&h, &s, tau, 1e-11).unwrap();
            let u = expm_hermitian(&ham.to_dense().unwrap(), tau);
            let expect = &u * DVector::from_column_slice(s.amplitudes());
            let d = out.amplitudes().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d < 1e-9, "L={l}: {d}");
        }
    }

    #[test]
    fn energy_and_norm_conserved() {
        let p = HubbardParams::new(4, 1.0, 1.0);
        let h = SparseHamiltonian::new(&build_hamiltonian(&p).unwrap()).unwrap();
        let mut s = random_state(8, 7);
        let e0 = h.energy(&s).unwrap();
        for _ in 0..5 {
            s = evolve_exact(&h, &s, 1.0, 1e-10).unwrap();
            assert!((h.energy(&s).unwrap() - e0).abs() < 1e-8);
        }
        assert!((s.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backwards_evolution_inverts() {
        let h = SparseHamiltonian::new(&build_hamiltonian(&HubbardParams::new(3, 1.0, 1.0)).unwrap()).unwrap();
        let s = random_state(6, 11);
        let fwd = evolve_exact(&h, &s, 2.0, 1e-11).unwrap();
        let back = evolve_exact(&h, &fwd, -2.0, 1e-11).unwrap();
        assert!((back.inner(&s).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_krylov_space_reports_failure() {
        let h = SparseHamiltonian::new(&build_hamiltonian(&HubbardParams::new(3, 1.0, 1.0)).unwrap()).unwrap();
        let s = random_state(6, 2);
        let opts = KrylovOptions { krylov_dim: 2, tol: 1e-14, min_step_fraction: 1e-3 };
        assert!(matches!(opts.evolve(&h, &s, 50.0), Err(Error::Numerical(_))));
    }
}
