//! Stochastic Pauli-trajectory execution of circuits under depolarizing gate
//! noise and asymmetric readout flips.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};
use crate::model::{Pauli, PauliString, PauliTermSum};
use crate::rng;
use crate::statevector::{Histogram, ReadoutNoise, StateVector};

/// Depolarizing gate noise plus readout flips.
///
/// `p2` acts after every two-qubit gate as one of the 15 non-identity
/// two-qubit Paulis, `p1` after every physical single-qubit gate as one of
/// `X, Y, Z`. `RZ` and `Z` are frame changes and stay noiseless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    /// Probability of reading 1 when the qubit is 0.
    #[serde(default)]
    pub p01: f64,
    /// Probability of reading 0 when the qubit is 1.
    #[serde(default)]
    pub p10: f64,
    /// Per-qubit readout probabilities overriding `p01`/`p10`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<ReadoutNoise>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { p1: 0.0, p2: 0.0, p01: 0.0, p10: 0.0, readout: None }
    }

    /// Median error rates of a current superconducting device: `sx` 2.834e-4,
    /// `cz` 2.521e-3, readout 8.972e-3 split asymmetrically 2:3.
    pub fn device_scale() -> Self {
        Self { p1: 2.834e-4, p2: 2.521e-3, p01: 0.4 * 2.0 * 8.972e-3, p10: 0.6 * 2.0 * 8.972e-3, readout: None }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p01", self.p01), ("p10", self.p10)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn readout_for(&self, n: usize) -> Result<ReadoutNoise> {
        match &self.readout {
            Some(r) if r.num_qubits() == n => Ok(r.clone()),
            Some(r) => Err(Error::WidthMismatch { expected: n, actual: r.num_qubits() }),
            None => ReadoutNoise::uniform(n, self.p01, self.p10),
        }
    }

    pub fn without_readout(&self) -> Self {
        Self { p01: 0.0, p10: 0.0, readout: None, ..self.clone() }
    }

    pub fn readout_only(&self) -> Self {
        Self { p1: 0.0, p2: 0.0, ..self.clone() }
    }

    fn gate_error_probability(&self, g: &Gate) -> f64 {
        match g.kind() {
            GateKind::Barrier | GateKind::RZ | GateKind::Z => 0.0,
            _ if g.is_two_qubit() => self.p2,
            _ => self.p1,
        }
    }
}

/// Shot budget for trajectory sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecOptions {
    pub shots: u64,
    /// Shots drawn from each sampled error trajectory.
    pub shots_per_trajectory: u64,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self { shots: 4000, shots_per_trajectory: 20 }
    }
}

impl ExecOptions {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.shots_per_trajectory == 0 {
            return Err(Error::InvalidParameter("shot counts must be positive".into()));
        }
        Ok(())
    }
}

/// A circuit appended with basis rotations so that every term of the group
/// becomes a `Z`-parity.
#[derive(Clone, Debug)]
pub struct MeasurementGroup {
    pub rotation: QuantumCircuit,
    /// `(coefficient, Z mask)` per term after rotation.
    pub terms: Vec<(f64, u64)>,
}

/// Greedy qubit-wise-commuting grouping. `X` is rotated with `H`, `Y` with
/// `RX(π/2)`. Identity terms are left out; see
/// [`PauliTermSum::identity_coefficient`].
pub fn measurement_groups(o: &PauliTermSum) -> Result<Vec<MeasurementGroup>> {
    let n = o.num_qubits();
    if n > 64 {
        return Err(Error::Capacity { backend: "measurement", width: n, cap: 64 });
    }
    let mut bases: Vec<Vec<Pauli>> = Vec::new();
    let mut members: Vec<Vec<(f64, &PauliString)>> = Vec::new();
    for (c, p) in o.terms().iter().filter(|(_, p)| !p.is_identity()) {
        let slot = bases.iter().position(|b| {
            p.letters().iter().zip(b).all(|(&x, &y)| x == Pauli::I || y == Pauli::I || x == y)
        });
        let k = match slot {
            Some(k) => k,
            None => {
                bases.push(vec![Pauli::I; n]);
                members.push(Vec::new());
                bases.len() - 1
            }
        };
        for (q, &x) in p.letters().iter().enumerate() {
            if x != Pauli::I {
                bases[k][q] = x;
            }
        }
        members[k].push((*c, p));
    }
    let mut out = Vec::new();
    for (basis, terms) in bases.into_iter().zip(members) {
        let mut rotation = QuantumCircuit::new(n);
        for (q, p) in basis.into_iter().enumerate() {
            match p {
                Pauli::X => rotation.push(Gate::h(q))?,
                Pauli::Y => rotation.push(Gate::rx(q, std::f64::consts::FRAC_PI_2))?,
                _ => {}
            }
        }
        let terms = terms.into_iter().map(|(c, p)| (c, p.support().fold(0u64, |m, q| m | 1 << q))).collect();
        out.push(MeasurementGroup { rotation, terms });
    }
    Ok(out)
}

const CHECKPOINT_BUDGET: usize = 1 << 22;

/// Noiseless reference states along a circuit, used as restart points for
/// trajectories whose first error occurs late.
struct Checkpoints {
    stride: usize,
    states: Vec<StateVector>,
    final_state: StateVector,
}

impl Checkpoints {
    fn new(c: &QuantumCircuit) -> Result<Self> {
        let n = c.num_qubits();
        let dim = 1usize << n;
        let len = c.len().max(1);
        let stride = (len * dim).div_ceil(CHECKPOINT_BUDGET).max(1);
        let mut s = StateVector::zeros(n)?;
        let mut states = vec![s.clone()];
        for (i, g) in c.gates().iter().enumerate() {
            s.apply_gate(g)?;
            if (i + 1) % stride == 0 {
                states.push(s.clone());
            }
        }
        Ok(Self { stride, states, final_state: s })
    }
}

fn random_pauli<R: Rng>(rng: &mut R) -> Pauli {
    Pauli::ALL[rng.random_range(1..4)]
}

fn pauli_gate(p: Pauli, q: usize) -> Option<Gate> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(Gate::x(q)),
        Pauli::Y => Some(Gate::y(q)),
        Pauli::Z => Some(Gate::z(q)),
    }
}

/// Error events `(gate index, error gates)` of one trajectory.
fn sample_errors<R: Rng>(c: &QuantumCircuit, noise: &NoiseModel, rng: &mut R) -> Vec<(usize, Vec<Gate>)> {
    let mut out = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        let p = noise.gate_error_probability(g);
        if p == 0.0 || rng.random::<f64>() >= p {
            continue;
        }
        let q = g.qubits();
        let paulis: Vec<Pauli> = if q.len() == 2 {
            let k = rng.random_range(1..16);
            vec![Pauli::ALL[k & 3], Pauli::ALL[k >> 2]]
        } else {
            vec![random_pauli(rng)]
        };
        let gates = paulis.iter().zip(q).filter_map(|(&p, &qq)| pauli_gate(p, qq)).collect();
        out.push((i, gates));
    }
    out
}

fn trajectory_state(c: &QuantumCircuit, cp: &Checkpoints, errors: &[(usize, Vec<Gate>)]) -> Result<StateVector> {
    let Some(&(first, _)) = errors.first() else {
        return Ok(cp.final_state.clone());
    };
    let k = first / cp.stride;
    let mut s = cp.states[k].clone();
    let mut next = errors.iter().peekable();
    for (i, g) in c.gates().iter().enumerate().skip(k * cp.stride) {
        s.apply_gate(g)?;
        while let Some((_, gates)) = next.next_if(|(j, _)| *j == i) {
            for e in gates {
                s.apply_gate(e)?;
            }
        }
    }
    Ok(s)
}

/// Run `opts.shots` noisy shots of `c`. Shot `k` uses flip mask
/// `masks[k % masks.len()]`: X gates on the mask's qubits just before
/// measurement, with the mask XORed back into the recorded bits. One
/// histogram (of un-flipped bits) is returned per mask; an empty mask list
/// means plain measurement.
pub fn sample_noisy(
    c: &QuantumCircuit,
    noise: &NoiseModel,
    opts: ExecOptions,
    masks: &[u64],
    seed: u64,
    path: &[u64],
) -> Result<Vec<Histogram>> {
    noise.validate()?;
    opts.validate()?;
    let n = c.num_qubits();
    let readout = noise.readout_for(n)?;
    let plain = [0u64];
    let masks = if masks.is_empty() { &plain[..] } else { masks };
    let cp = Checkpoints::new(c)?;
    let trajectories = opts.shots.div_ceil(opts.shots_per_trajectory);
    // flip probability from the depolarized X of a mask (X or Y error)
    let mask_flip = 2.0 * noise.p1 / 3.0;
    let run = |t: u64| -> Result<Vec<Histogram>> {
        let mut path = path.to_vec();
        path.push(t);
        let mut r = rng::stream(seed, &path);
        let errors = sample_errors(c, noise, &mut r);
        let state = trajectory_state(c, &cp, &errors)?;
        let first = t * opts.shots_per_trajectory;
        let count = opts.shots_per_trajectory.min(opts.shots - first);
        let mut hists = vec![Histogram::new(n); masks.len()];
        let mut cdf = Vec::with_capacity(state.amplitudes().len());
        let mut acc = 0.0;
        for z in state.amplitudes() {
            acc += z.norm_sqr();
            cdf.push(acc);
        }
        for k in first..first + count {
            let m = (k % masks.len() as u64) as usize;
            let mask = masks[m];
            let u = r.random::<f64>() * acc;
            let x = cdf.partition_point(|&v| v <= u).min(cdf.len() - 1) as u64;
            let mut y = x ^ mask;
            if mask_flip > 0.0 {
                for q in 0..n {
                    if mask >> q & 1 == 1 && r.random::<f64>() < mask_flip {
                        y ^= 1 << q;
                    }
                }
            }
            let y = readout.corrupt(y, &mut r) ^ mask;
            hists[m].record(y, 1);
        }
        Ok(hists)
    };
    let per: Vec<Vec<Histogram>> = (0..trajectories).into_par_iter().map(run).collect::<Result<_>>()?;
    let mut out = vec![Histogram::new(n); masks.len()];
    for hs in per {
        for (o, h) in out.iter_mut().zip(hs) {
            for (&k, &v) in h.counts() {
                o.record(k, v);
            }
        }
    }
    Ok(out)
}

/// Monte-Carlo estimate of `⟨O⟩` for `c` run from `|0…0⟩`. Each measurement
/// group gets the full shot budget.
pub fn noisy_expectation(c: &QuantumCircuit, o: &PauliTermSum, noise: &NoiseModel, opts: ExecOptions, seed: u64) -> Result<f64> {
    if o.num_qubits() != c.num_qubits() {
        return Err(Error::WidthMismatch { expected: c.num_qubits(), actual: o.num_qubits() });
    }
    let mut total = o.identity_coefficient();
    for (gi, group) in measurement_groups(o)?.iter().enumerate() {
        let mut circ = c.clone();
        circ.append(&group.rotation)?;
        let hist = &sample_noisy(&circ, noise, opts, &[], seed, &[gi as u64])?[0];
        total += group.terms.iter().map(|&(coef, mask)| coef * hist.parity_mean(mask)).sum::<f64>();
    }
    Ok(total)
}
