//! Line-oriented text form:
//!
//! ```text
//! QUBITS 4
//! RZ 0 0.25
//! CNOT 1 0
//! BARRIER
//! ```
//!
//! One gate per line as `KIND q... [angle]`; `#` starts a comment. Step tags
//! are not carried by the text form (use JSON for that).

use super::{Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};

pub fn to_text(c: &QuantumCircuit) -> String {
    let mut out = format!("QUBITS {}\n", c.num_qubits());
    for g in c.gates() {
        out.push_str(&g.to_string());
        out.push('\n');
    }
    out
}

pub fn from_text(src: &str) -> Result<QuantumCircuit> {
    let mut circuit: Option<QuantumCircuit> = None;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        let mut fields = line.split_whitespace();
        let head = fields.next().expect("non-empty line");
        let Some(c) = circuit.as_mut() else {
            if !head.eq_ignore_ascii_case("QUBITS") {
                return Err(err("expected 'QUBITS <n>' header".into()));
            }
            let n = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad qubit count".into()))?;
            circuit = Some(QuantumCircuit::new(n));
            continue;
        };
        let kind = GateKind::from_name(head).ok_or_else(|| err(format!("unknown gate {head:?}")))?;
        let rest: Vec<&str> = fields.collect();
        let want = kind.arity() + usize::from(kind.has_angle());
        if rest.len() != want {
            return Err(err(format!("{kind} expects {want} fields, got {}", rest.len())));
        }
        let qubits = rest[..kind.arity()]
            .iter()
            .map(|s| s.parse::<usize>().map_err(|_| err(format!("bad qubit {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let angle = if kind.has_angle() {
            rest[kind.arity()]
                .parse::<f64>()
                .map_err(|_| err(format!("bad angle {:?}", rest[kind.arity()])))?
        } else {
            0.0
        };
        c.push(Gate::from_parts(kind, &qubits, angle)?).map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or_else(|| Error::Parse("empty circuit file".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_preserves_angles_bitwise() {
        let mut c = QuantumCircuit::new(3);
        c.push(Gate::rz(0, 0.1 + 0.2)).unwrap();
        c.push(Gate::cnot(2, 0)).unwrap();
        c.push(Gate::barrier()).unwrap();
        c.push(Gate::rzz(1, 2, -std::f64::consts::PI / 7.0)).unwrap();
        let txt = to_text(&c);
        assert!(txt.starts_with("QUBITS 3\nRZ 0 0.30000000000000004\nCNOT 2 0\nBARRIER\n"));
        let back = from_text(&txt).unwrap();
        assert_eq!(back.gates(), c.gates());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = from_text("QUBITS 2\nFOO 1\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(from_text("CZ 0 1\n").is_err());
        assert!(from_text("QUBITS 2\nCZ 0 5\n").is_err());
        assert!(from_text("QUBITS 2\nRZ 0\n").is_err());
        let ok = from_text("# comment\nqubits 2\ncx 0 1 # trailing\n").unwrap();
        assert_eq!(ok.gates()[0], Gate::cnot(0, 1));
    }
}
