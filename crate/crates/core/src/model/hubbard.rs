use serde::{Deserialize, Serialize};

use super::{BasisState, Pauli, PauliString, PauliTermSum};
use crate::error::{Error, Result};

/// Couplings of the open-boundary chain. `hbar` is fixed to one, so times
/// are in units of ħ/E.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    pub sites: usize,
    pub t: f64,
    pub u: f64,
    #[serde(default)]
    pub mu_up: f64,
    #[serde(default)]
    pub mu_down: f64,
}

impl HubbardParams {
    pub fn new(sites: usize, t: f64, u: f64) -> Self {
        Self { sites, t, u, mu_up: 0.0, mu_down: 0.0 }
    }

    pub fn with_chemical_potential(mut self, mu_up: f64, mu_down: f64) -> Self {
        self.mu_up = mu_up;
        self.mu_down = mu_down;
        self
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.sites
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites)?;
        for (name, v) in [("t", self.t), ("U", self.u), ("mu_up", self.mu_up), ("mu_down", self.mu_down)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(Error::InvalidParameter("chain needs at least one site".into()));
    }
    if 2 * sites > 64 * 1024 {
        return Err(Error::InvalidParameter(format!("{sites} sites is unreasonably large")));
    }
    Ok(())
}

fn z(n: usize, q: usize) -> PauliString {
    PauliString::from_sparse(n, &[(q, Pauli::Z)]).expect("index checked by caller")
}

fn pair(n: usize, a: usize, pa: Pauli, b: usize, pb: Pauli) -> PauliString {
    PauliString::from_sparse(n, &[(a, pa), (b, pb)]).expect("index checked by caller")
}

/// Jordan-Wigner qubit Hamiltonian with the identity (energy offset) term.
pub fn build_hamiltonian(p: &HubbardParams) -> Result<PauliTermSum> {
    build_hamiltonian_with(p, true)
}

/// Jordan-Wigner qubit Hamiltonian. Each spin species carries its own
/// Jordan-Wigner string, so same-spin hopping between neighbouring sites is a
/// plain `XX + YY` on qubits two apart.
pub fn build_hamiltonian_with(p: &HubbardParams, include_identity: bool) -> Result<PauliTermSum> {
    p.validate()?;
    let n = p.num_qubits();
    let mut terms = Vec::new();
    let hop = -p.t / 2.0;
    for j in 0..p.sites.saturating_sub(1) {
        for (a, b) in [(2 * j, 2 * j + 2), (2 * j + 1, 2 * j + 3)] {
            terms.push((hop, pair(n, a, Pauli::X, b, Pauli::X)));
            terms.push((hop, pair(n, a, Pauli::Y, b, Pauli::Y)));
        }
    }
    let quarter_u = p.u / 4.0;
    let mut offset = 0.0;
    for j in 0..p.sites {
        let (up, down) = (2 * j, 2 * j + 1);
        offset += quarter_u + (p.mu_up + p.mu_down) / 2.0;
        terms.push((quarter_u, pair(n, up, Pauli::Z, down, Pauli::Z)));
        terms.push((-quarter_u - p.mu_up / 2.0, z(n, up)));
        terms.push((-quarter_u - p.mu_down / 2.0, z(n, down)));
    }
    if include_identity {
        terms.push((offset, PauliString::identity(n)));
    }
    PauliTermSum::new(n, terms)
}

/// Staggered magnetization `(1/4L) Σ_j (-1)^j (Z_{2j+1} - Z_{2j})`.
pub fn neel_operator(sites: usize) -> Result<PauliTermSum> {
    check_sites(sites)?;
    let n = 2 * sites;
    let w = 1.0 / (4.0 * sites as f64);
    let mut terms = Vec::with_capacity(n);
    for j in 0..sites {
        let s = if j % 2 == 0 { w } else { -w };
        terms.push((s, z(n, 2 * j + 1)));
        terms.push((-s, z(n, 2 * j)));
    }
    PauliTermSum::new(n, terms)
}

/// Total particle number `½ Σ_k (I - Z_k)`.
pub fn total_number_operator(sites: usize) -> Result<PauliTermSum> {
    check_sites(sites)?;
    let n = 2 * sites;
    let mut terms: Vec<_> = (0..n).map(|k| (-0.5, z(n, k))).collect();
    terms.push((n as f64 / 2.0, PauliString::identity(n)));
    PauliTermSum::new(n, terms)
}

/// Total `S^z = ¼ Σ_j (Z_{2j+1} - Z_{2j})`.
pub fn total_sz_operator(sites: usize) -> Result<PauliTermSum> {
    check_sites(sites)?;
    let n = 2 * sites;
    let mut terms = Vec::with_capacity(n);
    for j in 0..sites {
        terms.push((0.25, z(n, 2 * j + 1)));
        terms.push((-0.25, z(n, 2 * j)));
    }
    PauliTermSum::new(n, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinAxis {
    X,
    Y,
}

/// Transverse spin of site `j`, with a Z string over qubits `0..2j`.
pub fn site_spin_xy_operator(sites: usize, j: usize, axis: SpinAxis) -> Result<PauliTermSum> {
    check_sites(sites)?;
    if j >= sites {
        return Err(Error::InvalidParameter(format!("site {j} out of range for {sites} sites")));
    }
    let n = 2 * sites;
    let with_prefix = |a: Pauli, b: Pauli| {
        let mut ops: Vec<(usize, Pauli)> = (0..2 * j).map(|q| (q, Pauli::Z)).collect();
        ops.push((2 * j, a));
        ops.push((2 * j + 1, b));
        PauliString::from_sparse(n, &ops).expect("indices in range")
    };
    let terms = match axis {
        SpinAxis::X => vec![(0.25, with_prefix(Pauli::X, Pauli::X)), (0.25, with_prefix(Pauli::Y, Pauli::Y))],
        SpinAxis::Y => vec![(0.25, with_prefix(Pauli::X, Pauli::Y)), (-0.25, with_prefix(Pauli::Y, Pauli::X))],
    };
    PauliTermSum::new(n, terms)
}

/// Spin up on even sites, spin down on odd sites: `|1001 1001 ...⟩`.
pub fn neel_state(sites: usize) -> Result<BasisState> {
    check_sites(sites)?;
    let mut bits = vec![false; 2 * sites];
    for j in 0..sites {
        if j % 2 == 0 {
            bits[2 * j] = true;
        } else {
            bits[2 * j + 1] = true;
        }
    }
    BasisState::new(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn listing(sum: &PauliTermSum) -> Vec<(f64, String)> {
        sum.terms().iter().map(|(c, s)| (*c, s.to_string())).collect()
    }

    /// Diagonal expectation on a basis state.
    fn diag_expect(sum: &PauliTermSum, b: &BasisState) -> f64 {
        sum.terms()
            .iter()
            .map(|(c, s)| {
                assert!(s.is_diagonal());
                let parity = s.support().filter(|&q| b.bit(q)).count() % 2;
                if parity == 1 { -c } else { *c }
            })
            .sum()
    }

    #[test]
    fn single_site_is_pure_interaction() {
        let h = build_hamiltonian(&HubbardParams::new(1, 1.0, 4.0)).unwrap();
        let mut got = listing(&h);
        got.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(
            got,
            vec![(1.0, "II".into()), (-1.0, "IZ".into()), (-1.0, "ZI".into()), (1.0, "ZZ".into())]
        );
    }

    #[test]
    fn two_sites_free_hopping_terms() {
        let h = build_hamiltonian_with(&HubbardParams::new(2, 1.0, 0.0), false).unwrap();
        assert_eq!(h.len(), 4);
        for s in ["XIXI", "YIYI", "IXIX", "IYIY"] {
            assert_eq!(h.coefficient(&ps(s)), -0.5, "{s}");
        }
    }

    #[test]
    fn chemical_potential_enters_single_z() {
        let p = HubbardParams::new(3, 1.0, 1.0).with_chemical_potential(0.3, 0.7);
        let h = build_hamiltonian(&p).unwrap();
        assert!((h.coefficient(&ps("ZIIIII")) - (-0.4)).abs() < 1e-15);
        assert!((h.coefficient(&ps("IZIIII")) - (-0.6)).abs() < 1e-15);
        assert!((h.identity_coefficient() - 3.0 * (0.25 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_chain() {
        assert!(build_hamiltonian(&HubbardParams::new(0, 1.0, 1.0)).is_err());
        assert!(neel_operator(0).is_err());
        assert!(build_hamiltonian(&HubbardParams::new(2, f64::INFINITY, 1.0)).is_err());
    }

    #[test]
    fn terms_are_at_most_next_nearest_neighbour() {
        let h = build_hamiltonian(&HubbardParams::new(6, 1.0, 2.0).with_chemical_potential(0.1, 0.2)).unwrap();
        for (_, s) in h.terms() {
            let sup: Vec<usize> = s.support().collect();
            if let (Some(a), Some(b)) = (sup.first(), sup.last()) {
                assert!(b - a <= 2, "{s}");
            }
        }
    }

    #[test]
    fn neel_operator_small_cases() {
        let mut got = listing(&neel_operator(1).unwrap());
        got.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(got, vec![(0.25, "IZ".into()), (-0.25, "ZI".into())]);

        let o = neel_operator(2).unwrap();
        assert_eq!(o.coefficient(&ps("IZII")), 0.125);
        assert_eq!(o.coefficient(&ps("ZIII")), -0.125);
        assert_eq!(o.coefficient(&ps("IIIZ")), -0.125);
        assert_eq!(o.coefficient(&ps("IIZI")), 0.125);
    }

    #[test]
    fn neel_state_patterns() {
        assert_eq!(neel_state(1).unwrap().to_string(), "10");
        assert_eq!(neel_state(2).unwrap().to_string(), "1001");
        assert_eq!(neel_state(4).unwrap().to_string(), "10011001");
    }

    #[test]
    fn charges_on_reference_states() {
        for l in 1..=7 {
            let neel = neel_state(l).unwrap();
            assert!((diag_expect(&neel_operator(l).unwrap(), &neel) - 0.5).abs() < 1e-14);
            assert!((diag_expect(&total_number_operator(l).unwrap(), &neel) - l as f64).abs() < 1e-14);
            // odd chains carry one extra up spin
            let sz = if l % 2 == 0 { 0.0 } else { 0.5 };
            assert!((diag_expect(&total_sz_operator(l).unwrap(), &neel) - sz).abs() < 1e-14);
            let vac = BasisState::zeros(2 * l).unwrap();
            assert!(diag_expect(&total_number_operator(l).unwrap(), &vac).abs() < 1e-14);
        }
    }

    #[test]
    fn transverse_spin_strings() {
        let sx = site_spin_xy_operator(1, 0, SpinAxis::X).unwrap();
        assert_eq!(listing(&sx), vec![(0.25, "XX".into()), (0.25, "YY".into())]);
        let sy = site_spin_xy_operator(2, 1, SpinAxis::Y).unwrap();
        assert_eq!(sy.coefficient(&ps("ZZXY")), 0.25);
        assert_eq!(sy.coefficient(&ps("ZZYX")), -0.25);
        assert_eq!(sy.len(), 2);
        assert!(site_spin_xy_operator(2, 2, SpinAxis::X).is_err());
    }
}
