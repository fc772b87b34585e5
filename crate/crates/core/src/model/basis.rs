use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Computational basis state; `bits[k]` is the value of qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct BasisState {
    bits: Vec<bool>,
}

impl BasisState {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("basis state needs at least one qubit".into()));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, q: usize) -> bool {
        self.bits[q]
    }

    /// Integer index with qubit 0 as least significant bit.
    pub fn index(&self) -> usize {
        assert!(self.bits.len() < usize::BITS as usize);
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0, |acc, (q, _)| acc | (1 << q))
    }

    /// Qubits set to one.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(q, _)| q)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad bit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

/// JSON form: `{"num_qubits": 4, "bits": "1001"}`.
#[derive(Serialize, Deserialize)]
struct BasisRepr {
    num_qubits: usize,
    bits: String,
}

impl From<BasisState> for BasisRepr {
    fn from(b: BasisState) -> Self {
        Self { num_qubits: b.num_qubits(), bits: b.to_string() }
    }
}

impl TryFrom<BasisRepr> for BasisState {
    type Error = Error;

    fn try_from(r: BasisRepr) -> Result<Self> {
        let b: BasisState = r.bits.parse()?;
        if b.num_qubits() != r.num_qubits {
            return Err(Error::WidthMismatch { expected: r.num_qubits, actual: b.num_qubits() });
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_lsb_first() {
        let b: BasisState = "1001".parse().unwrap();
        assert_eq!(b.index(), 0b1001);
        let b: BasisState = "10".parse().unwrap();
        assert_eq!(b.index(), 1);
    }

    #[test]
    fn json_round_trip_checks_width() {
        let b: BasisState = "1001".parse().unwrap();
        let js = serde_json::to_string(&b).unwrap();
        assert_eq!(js, r#"{"num_qubits":4,"bits":"1001"}"#);
        assert_eq!(serde_json::from_str::<BasisState>(&js).unwrap(), b);
        assert!(serde_json::from_str::<BasisState>(r#"{"num_qubits":3,"bits":"1001"}"#).is_err());
    }
}
