//! Small dense linear-algebra helpers shared by oracles and backends.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `exp(-i t H)` for a Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -t * e)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Global phase `e^{iφ}` that best aligns `b` onto `a` (taken at the largest
/// entry of `b`).
pub fn alignment_phase(a: &[C64], b: &[C64]) -> C64 {
    let (k, _) = b
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let ratio = a[k] / b[k];
    if ratio.norm() == 0.0 || !ratio.norm().is_finite() {
        ONE
    } else {
        ratio / ratio.norm()
    }
}

/// Max elementwise deviation between `a` and `b` after optimal global-phase
/// alignment. Slices must have equal length.
pub fn max_diff_up_to_phase(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let phase = alignment_phase(a, b);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn matrix_diff_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    max_diff_up_to_phase(a.as_slice(), b.as_slice())
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Thin SVD `a = u · diag(s) · v_t` with `k = min(m, n)` singular values,
/// not necessarily sorted.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v_t: CMatrix,
}

impl Svd {
    pub fn recompose(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, mut col) in us.column_iter_mut().enumerate() {
            col *= C64::new(self.s[j], 0.0);
        }
        us * &self.v_t
    }

    fn defect(&self, a: &CMatrix) -> f64 {
        let k = self.s.len();
        let id = CMatrix::identity(k, k);
        let rec = (self.recompose() - a).norm() / a.norm().max(f64::MIN_POSITIVE);
        let uu = max_abs_diff(&(self.u.adjoint() * &self.u), &id);
        let vv = max_abs_diff(&(&self.v_t * self.v_t.adjoint()), &id);
        rec.max(uu).max(vv)
    }
}

const SVD_DEFECT: f64 = 1e-12;

/// SVD accurate to working precision. The bidiagonal solver is tried first;
/// its result is checked for reconstruction and orthonormality, and a
/// one-sided Jacobi iteration takes over when the check fails (it does on
/// some nearly rank-deficient blocks).
pub fn svd(a: &CMatrix) -> Svd {
    let fast = a.clone().svd(true, true);
    if let (Some(u), Some(v_t)) = (fast.u, fast.v_t) {
        let cand = Svd { u, s: fast.singular_values.iter().copied().collect(), v_t };
        if cand.s.iter().all(|x| x.is_finite()) && cand.defect(a) <= SVD_DEFECT {
            return cand;
        }
    }
    jacobi_svd(a)
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn jacobi_svd(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = jacobi_svd(&a.adjoint());
        return Svd { u: t.v_t.adjoint(), s: t.s, v_t: t.u.adjoint() };
    }
    let mut g = a.clone();
    let mut v = CMatrix::identity(n, n);
    let tol = f64::EPSILON * m as f64;
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let gs = g.as_slice();
                    let (cp, cq) = (&gs[p * m..(p + 1) * m], &gs[q * m..(q + 1) * m]);
                    let mut gamma = ZERO;
                    let (mut alpha, mut beta) = (0.0, 0.0);
                    for (x, y) in cp.iter().zip(cq) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    (alpha, beta, gamma)
                };
                let mag = gamma.norm();
                if mag == 0.0 || mag <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / mag).conj();
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(g.as_mut_slice(), m, p, q, phase, c, s);
                rotate(v.as_mut_slice(), n, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut u = CMatrix::zeros(m, n);
    let mut sv = vec![0.0; n];
    for (j, s) in sv.iter_mut().enumerate() {
        let norm = g.column(j).norm();
        *s = norm;
        if norm > 0.0 {
            u.set_column(j, &(g.column(j) / C64::new(norm, 0.0)));
        }
    }
    Svd { u, s: sv, v_t: v.adjoint() }
}

fn rotate(data: &mut [C64], rows: usize, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yp = *y * phase;
        *y = *x * s + yp * c;
        *x = *x * c - yp * s;
    }
}

/// Spectral norm of a square matrix.
pub fn operator_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().max()
}
