use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    X,
    Y,
    Z,
    SX,
    H,
    RX,
    RZ,
    CNOT,
    CZ,
    SWAP,
    RZZ,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::SX,
        GateKind::H,
        GateKind::RX,
        GateKind::RZ,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::SWAP,
        GateKind::RZZ,
        GateKind::Barrier,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::SWAP | GateKind::RZZ => 2,
            GateKind::Barrier => 0,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RZ | GateKind::RZZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::SX => "SX",
            GateKind::H => "H",
            GateKind::RX => "RX",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::RZZ => "RZZ",
            GateKind::Barrier => "BARRIER",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let up = s.to_ascii_uppercase();
        let alias = match up.as_str() {
            "CX" => "CNOT",
            other => other,
        };
        Self::ALL.into_iter().find(|k| k.name() == alias)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Local unitary of a gate. For two-qubit gates the local index is
/// `bit(qubits[0]) + 2 * bit(qubits[1])`; matrices are row-major.
#[derive(Clone, Copy, Debug)]
pub enum GateMatrix {
    One([C64; 4]),
    Two([C64; 16]),
}

/// A gate application. `CNOT` lists `[control, target]`; a barrier spans the
/// whole register.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    #[serde(default = "no_qubits", skip_serializing_if = "has_no_qubits", with = "qubit_list")]
    qubits: [usize; 2],
    #[serde(default, skip_serializing_if = "is_zero")]
    angle: f64,
}

fn no_qubits() -> [usize; 2] {
    [NONE, NONE]
}

fn has_no_qubits(q: &[usize; 2]) -> bool {
    q[0] == NONE
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

mod qubit_list {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &[usize; 2], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(q.iter().filter(|&&x| x != usize::MAX))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[usize; 2], D::Error> {
        let v: Vec<usize> = Vec::deserialize(d)?;
        if v.len() > 2 {
            return Err(serde::de::Error::custom("at most two qubits per gate"));
        }
        let mut out = [usize::MAX; 2];
        out[..v.len()].copy_from_slice(&v);
        Ok(out)
    }
}

const NONE: usize = usize::MAX;

impl Gate {
    fn one(kind: GateKind, q: usize, angle: f64) -> Self {
        Self { kind, qubits: [q, NONE], angle }
    }

    fn two(kind: GateKind, a: usize, b: usize, angle: f64) -> Self {
        Self { kind, qubits: [a, b], angle }
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, 0.0)
    }
    pub fn y(q: usize) -> Self {
        Self::one(GateKind::Y, q, 0.0)
    }
    pub fn z(q: usize) -> Self {
        Self::one(GateKind::Z, q, 0.0)
    }
    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::SX, q, 0.0)
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, 0.0)
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::one(GateKind::RX, q, theta)
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::RZ, q, theta)
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::two(GateKind::CNOT, control, target, 0.0)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::two(GateKind::CZ, a, b, 0.0)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::SWAP, a, b, 0.0)
    }
    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::RZZ, a, b, theta)
    }
    pub fn barrier() -> Self {
        Self { kind: GateKind::Barrier, qubits: [NONE, NONE], angle: 0.0 }
    }

    /// Build from a kind, its qubits and (when applicable) its angle.
    pub fn from_parts(kind: GateKind, qubits: &[usize], angle: f64) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::Parse(format!("{kind} takes {} qubits, got {}", kind.arity(), qubits.len())));
        }
        let angle = if kind.has_angle() { angle } else { 0.0 };
        Ok(match kind.arity() {
            0 => Self::barrier(),
            1 => Self::one(kind, qubits[0], angle),
            _ => Self::two(kind, qubits[0], qubits[1], angle),
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity() == 2
    }

    pub fn is_barrier(&self) -> bool {
        self.kind == GateKind::Barrier
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits().contains(&q)
    }

    pub(crate) fn validate(&self, width: usize) -> Result<()> {
        for &q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { index: q, width });
            }
        }
        if self.arity() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidParameter(format!("{} needs distinct qubits", self.kind)));
        }
        if !self.angle.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite angle on {}", self.kind)));
        }
        Ok(())
    }

    pub(crate) fn shifted(&self, offset: usize) -> Self {
        let mut g = *self;
        for q in g.qubits.iter_mut().take(self.arity()) {
            *q += offset;
        }
        g
    }

    /// Same gate acting on remapped qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut g = *self;
        for q in g.qubits.iter_mut().take(self.arity()) {
            *q = map(*q);
        }
        g
    }

    /// Local unitary; `None` for barriers.
    pub fn matrix(&self) -> Option<GateMatrix> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let i = C64::new(0.0, 1.0);
        let t = self.angle;
        let m = match self.kind {
            GateKind::X => GateMatrix::One([ZERO, ONE, ONE, ZERO]),
            GateKind::Y => GateMatrix::One([ZERO, -i, i, ZERO]),
            GateKind::Z => GateMatrix::One([ONE, ZERO, ZERO, -ONE]),
            GateKind::H => GateMatrix::One([h, h, h, -h]),
            GateKind::SX => {
                let a = C64::new(0.5, 0.5);
                let b = C64::new(0.5, -0.5);
                GateMatrix::One([a, b, b, a])
            }
            GateKind::RX => {
                let c = C64::new((t / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(t / 2.0).sin());
                GateMatrix::One([c, s, s, c])
            }
            GateKind::RZ => GateMatrix::One([
                C64::from_polar(1.0, -t / 2.0),
                ZERO,
                ZERO,
                C64::from_polar(1.0, t / 2.0),
            ]),
            GateKind::CNOT => {
                // local bit 0 = control, bit 1 = target
                let mut m = [ZERO; 16];
                for (row, col) in [(0, 0), (3, 1), (2, 2), (1, 3)] {
                    m[row * 4 + col] = ONE;
                }
                GateMatrix::Two(m)
            }
            GateKind::CZ => {
                let mut m = [ZERO; 16];
                m[0] = ONE;
                m[5] = ONE;
                m[10] = ONE;
                m[15] = -ONE;
                GateMatrix::Two(m)
            }
            GateKind::SWAP => {
                let mut m = [ZERO; 16];
                for (row, col) in [(0, 0), (2, 1), (1, 2), (3, 3)] {
                    m[row * 4 + col] = ONE;
                }
                GateMatrix::Two(m)
            }
            GateKind::RZZ => {
                let same = C64::from_polar(1.0, -t / 2.0);
                let diff = C64::from_polar(1.0, t / 2.0);
                let mut m = [ZERO; 16];
                m[0] = same;
                m[5] = diff;
                m[10] = diff;
                m[15] = same;
                GateMatrix::Two(m)
            }
            GateKind::Barrier => return None,
        };
        Some(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if self.kind.has_angle() {
            write!(f, " {}", self.angle)?;
        }
        Ok(())
    }
}
