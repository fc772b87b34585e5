//! Hamiltonian and charges against a brute-force fermionic construction on
//! the occupation basis.

use hubbard_core::model::{build_hamiltonian, neel_operator, neel_state, total_number_operator, total_sz_operator, HubbardParams};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Modes ordered all spin-up sites first, then all spin-down sites.
fn qubit_of(mode: usize, sites: usize) -> usize {
    if mode < sites {
        2 * mode
    } else {
        2 * (mode - sites) + 1
    }
}

/// Dense annihilation operator for `mode` on 2L qubits.
fn annihilate(mode: usize, sites: usize) -> DMatrix<C64> {
    let n = 2 * sites;
    let dim = 1usize << n;
    let q = qubit_of(mode, sites);
    let mut m = DMatrix::zeros(dim, dim);
    for idx in 0..dim {
        if idx >> q & 1 == 0 {
            continue;
        }
        let before = (0..mode).filter(|&k| idx >> qubit_of(k, sites) & 1 == 1).count();
        let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
        m[(idx ^ (1 << q), idx)] = C64::new(sign, 0.0);
    }
    m
}

fn fermionic_hamiltonian(p: &HubbardParams) -> DMatrix<C64> {
    let l = p.sites;
    let c: Vec<_> = (0..2 * l).map(|m| annihilate(m, l)).collect();
    let cd: Vec<_> = c.iter().map(|m| m.adjoint()).collect();
    let num: Vec<_> = (0..2 * l).map(|m| &cd[m] * &c[m]).collect();
    let dim = 1usize << (2 * l);
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let t = C64::new(p.t, 0.0);
    for spin in 0..2 {
        for j in 0..l.saturating_sub(1) {
            let a = spin * l + j;
            let b = a + 1;
            h -= (&cd[a] * &c[b] + &cd[b] * &c[a]) * t;
        }
    }
    for j in 0..l {
        h += &num[j] * &num[l + j] * C64::new(p.u, 0.0);
        h += &num[j] * C64::new(p.mu_up, 0.0);
        h += &num[l + j] * C64::new(p.mu_down, 0.0);
    }
    h
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn hamiltonian_matches_fermionic_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = vec![HubbardParams::new(3, 1.0, 1.0).with_chemical_potential(0.3, 0.7)];
    for l in 1..=4 {
        cases.push(
            HubbardParams::new(l, rng.random_range(-2.0..2.0), rng.random_range(-4.0..4.0))
                .with_chemical_potential(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
    }
    for p in cases {
        let pauli = build_hamiltonian(&p).unwrap().to_dense().unwrap();
        let oracle = fermionic_hamiltonian(&p);
        assert!(max_diff(&pauli, &oracle) < 1e-12, "{p:?}");
    }
}

#[test]
fn z0_coefficient_l3() {
    let p = HubbardParams::new(3, 1.0, 1.0).with_chemical_potential(0.3, 0.7);
    let h = build_hamiltonian(&p).unwrap();
    let z0 = h.terms().iter().find(|(_, s)| s.weight() == 1 && s.get(0) == hubbard_core::model::Pauli::Z).unwrap();
    assert!((z0.0 + 0.4).abs() < 1e-15);
}

#[test]
fn charges_match_fermionic_number_operators() {
    for l in 1..=3 {
        let c: Vec<_> = (0..2 * l).map(|m| annihilate(m, l)).collect();
        let num: Vec<_> = c.iter().map(|m| m.adjoint() * m).collect();
        let n_tot: DMatrix<C64> = num.iter().sum();
        let up: DMatrix<C64> = num[..l].iter().sum();
        let down: DMatrix<C64> = num[l..].iter().sum();
        let sz = (&up - &down) * C64::new(0.5, 0.0);
        assert!(max_diff(&total_number_operator(l).unwrap().to_dense().unwrap(), &n_tot) < 1e-12);
        assert!(max_diff(&total_sz_operator(l).unwrap().to_dense().unwrap(), &sz) < 1e-12);
        let h = fermionic_hamiltonian(&HubbardParams::new(l, 1.0, 2.0));
        assert!(max_diff(&(&h * &n_tot), &(&n_tot * &h)) < 1e-12);
        assert!(max_diff(&(&h * &sz), &(&sz * &h)) < 1e-12);
    }
}

#[test]
fn neel_expectation_is_one_half() {
    for l in 1..=6 {
        let o = neel_operator(l).unwrap();
        let b = neel_state(l).unwrap();
        let idx = b.index();
        let mut v = 0.0;
        for (c, s) in o.terms() {
            let z = s.support().filter(|&q| idx >> q & 1 == 1).count();
            v += c * if z % 2 == 0 { 1.0 } else { -1.0 };
        }
        assert!((v - 0.5).abs() < 1e-15, "L={l}");
    }
}
