use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Flips the computational-basis bit (X or Y).
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Picks up a `(-1)^bit` sign (Z or Y).
    pub fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// 2×2 matrix, row-major.
    pub fn matrix(self) -> [C64; 4] {
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [o, ZERO, ZERO, o],
            Pauli::X => [ZERO, o, o, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [o, ZERO, ZERO, -o],
        }
    }
}

/// Tensor product of single-qubit Paulis; letter `k` acts on qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidParameter("Pauli string must act on at least one qubit".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n.max(1)] }
    }

    /// Identity except for the listed `(qubit, letter)` pairs.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in ops {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, width: n });
            }
            s.letters[q] = p;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|p| !p.flips())
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }

    /// Bit masks `(flip, sign)` and the number of `Y` letters. Only valid for
    /// strings of at most 64 qubits.
    ///
    /// `P|x⟩ = i^{n_y} (-1)^{popcount(x & sign)} |x ^ flip⟩`.
    pub fn masks(&self) -> (u64, u64, u32) {
        assert!(self.len() <= 64, "bit masks limited to 64 qubits");
        let mut flip = 0u64;
        let mut sign = 0u64;
        let mut ny = 0;
        for (q, &p) in self.letters.iter().enumerate() {
            if p.flips() {
                flip |= 1 << q;
            }
            if p.signs() {
                sign |= 1 << q;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        (flip, sign, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Real-weighted sum of Pauli strings on a fixed number of qubits, kept in
/// canonical form: sorted by letters, duplicates merged, zero weights dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermSumRepr", into = "TermSumRepr")]
pub struct PauliTermSum {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliTermSum {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter("term sum needs at least one qubit".into()));
        }
        for (c, s) in &terms {
            if s.len() != num_qubits {
                return Err(Error::WidthMismatch { expected: num_qubits, actual: s.len() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient {c} on {s}")));
            }
        }
        let mut sum = Self { num_qubits, terms };
        sum.canonicalize();
        Ok(sum)
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self { num_qubits, terms: Vec::new() }
    }

    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(f64, PauliString)> = Vec::with_capacity(self.terms.len());
        for (c, s) in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.1 == s => last.0 += c,
                _ => merged.push((c, s)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        self.terms = merged;
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `s`, zero when absent.
    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms
            .binary_search_by(|(_, t)| t.cmp(s))
            .map(|i| self.terms[i].0)
            .unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.num_qubits))
    }

    pub fn without_identity(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().filter(|(_, s)| !s.is_identity()).cloned().collect(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_diagonal())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self {
            num_qubits: self.num_qubits,
            terms: self.terms.iter().map(|(c, s)| (c * factor, s.clone())).collect(),
        };
        out.canonicalize();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.num_qubits, terms)
    }

    /// Dense matrix (test scale). Row/column index bit `k` is qubit `k`.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.num_qubits > 14 {
            return Err(Error::Capacity { backend: "dense", width: self.num_qubits, cap: 14 });
        }
        let dim = 1usize << self.num_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            let (flip, sign, ny) = s.masks();
            let base = i_pow(ny) * *c;
            for x in 0..dim as u64 {
                let val = if (x & sign).count_ones() % 2 == 1 { -base } else { base };
                m[((x ^ flip) as usize, x as usize)] += val;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliTermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c} {s}")?;
        }
        Ok(())
    }
}

/// JSON form: `{"num_qubits": 4, "terms": ["-0.5 XIXI", ...]}`.
#[derive(Serialize, Deserialize)]
struct TermSumRepr {
    num_qubits: usize,
    terms: Vec<String>,
}

impl From<PauliTermSum> for TermSumRepr {
    fn from(s: PauliTermSum) -> Self {
        Self {
            num_qubits: s.num_qubits,
            terms: s.terms.iter().map(|(c, p)| format!("{c} {p}")).collect(),
        }
    }
}

impl TryFrom<TermSumRepr> for PauliTermSum {
    type Error = Error;

    fn try_from(r: TermSumRepr) -> Result<Self> {
        let terms = r.terms.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>>>()?;
        PauliTermSum::new(r.num_qubits, terms)
    }
}

fn parse_term(t: &str) -> Result<(f64, PauliString)> {
    let mut parts = t.split_whitespace();
    let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse(format!("expected '<coefficient> <letters>', got {t:?}")));
    };
    let c: f64 = c
        .replace('\u{2212}', "-")
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient in {t:?}")))?;
    Ok((c, s.parse()?))
}
