//! Twirled readout error extinction.
//!
//! Each of `samples` random flip masks puts X gates on the masked qubits just
//! before measurement and XORs the mask back into the recorded bits. This
//! turns any per-qubit flip channel into a symmetric one, under which every
//! `Z`-parity is scaled by `Π (1 - p01 - p10)` over its support. The same
//! randomised measurement of `|0…0⟩` estimates those factors, and the
//! calibrated value divides them out term by term.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::{sample_noisy, ExecOptions, NoiseModel};
use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::model::PauliTermSum;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrexEstimate {
    /// Average over masks, before calibration.
    pub symmetrized: f64,
    /// Each term divided by its calibration factor.
    pub calibrated: f64,
    /// Calibration factor per non-identity term.
    pub factors: Vec<f64>,
}

pub fn random_masks(n: usize, samples: usize, seed: u64, path: &[u64]) -> Vec<u64> {
    let mut r = rng::stream(seed, path);
    let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..samples).map(|_| r.random::<u64>() & full).collect()
}

/// Per-term Z-parity means under randomised measurement.
pub(crate) fn parity_means(
    c: &QuantumCircuit,
    terms: &[(f64, u64)],
    masks: &[u64],
    noise: &NoiseModel,
    opts: ExecOptions,
    seed: u64,
    path: &[u64],
) -> Result<Vec<f64>> {
    let hists = sample_noisy(c, noise, opts, masks, seed, path)?;
    Ok(terms
        .iter()
        .map(|&(_, m)| hists.iter().map(|h| h.parity_mean(m)).sum::<f64>() / hists.len() as f64)
        .collect())
}

pub(crate) fn calibrated_sum(terms: &[(f64, u64)], means: &[f64], factors: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for ((&(c, m), &v), &f) in terms.iter().zip(means).zip(factors) {
        if f.abs() < 1e-3 {
            return Err(Error::Numerical(format!("readout calibration factor {f} for mask {m:#b} too small")));
        }
        total += c * v / f;
    }
    Ok(total)
}

/// TREX estimate of a diagonal observable after running `c` on `|0…0⟩`.
/// Calibration uses the same masks and shot budget.
pub fn apply_trex(
    c: &QuantumCircuit,
    o: &PauliTermSum,
    samples: usize,
    noise: &NoiseModel,
    opts: ExecOptions,
    seed: u64,
) -> Result<TrexEstimate> {
    if !o.is_diagonal() {
        return Err(Error::NonDiagonalObservable);
    }
    if o.num_qubits() != c.num_qubits() {
        return Err(Error::WidthMismatch { expected: c.num_qubits(), actual: o.num_qubits() });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("TREX needs at least one sample".into()));
    }
    let n = c.num_qubits();
    let terms: Vec<(f64, u64)> = o
        .terms()
        .iter()
        .filter(|(_, p)| !p.is_identity())
        .map(|(coef, p)| (*coef, p.masks().1))
        .collect();
    let masks = random_masks(n, samples, seed, &[0]);
    let means = parity_means(c, &terms, &masks, noise, opts, seed, &[1])?;
    let factors = parity_means(&QuantumCircuit::new(n), &terms, &masks, noise, opts, seed, &[2])?;
    let offset = o.identity_coefficient();
    let symmetrized = offset + terms.iter().zip(&means).map(|(&(coef, _), v)| coef * v).sum::<f64>();
    let calibrated = offset + calibrated_sum(&terms, &means, &factors)?;
    Ok(TrexEstimate { symmetrized, calibrated, factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn all_ones(n: usize) -> QuantumCircuit {
        let mut c = QuantumCircuit::new(n);
        for q in 0..n {
            c.push(Gate::x(q)).unwrap();
        }
        c
    }

    fn z_sum(n: usize) -> PauliTermSum {
        let terms = (0..n)
            .map(|q| {
                let s: String = (0..n).map(|k| if k == q { 'Z' } else { 'I' }).collect();
                (1.0 / n as f64, s.parse().unwrap())
            })
            .collect();
        PauliTermSum::new(n, terms).unwrap()
    }

    #[test]
    fn symmetrised_value_matches_symmetric_channel() {
        let (p01, p10) = (0.02, 0.08);
        let noise = NoiseModel { p01, p10, ..NoiseModel::noiseless() };
        let opts = ExecOptions { shots: 40_000, shots_per_trajectory: 1000 };
        let est = apply_trex(&all_ones(3), &z_sum(3), 10, &noise, opts, 4).unwrap();
        let factor = 1.0 - p01 - p10;
        let sigma = 1.0 / (opts.shots as f64).sqrt();
        assert!((est.symmetrized / factor + 1.0).abs() < 3.0 * sigma / factor, "{est:?}");
        assert!((est.calibrated + 1.0).abs() < 4.0 * sigma / factor, "{est:?}");
        for f in &est.factors {
            assert!((f - factor).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn no_readout_noise_is_plain_measurement() {
        let opts = ExecOptions { shots: 1000, shots_per_trajectory: 100 };
        let est = apply_trex(&all_ones(2), &z_sum(2), 10, &NoiseModel::noiseless(), opts, 1).unwrap();
        assert_eq!(est.symmetrized, -1.0);
        assert_eq!(est.calibrated, -1.0);
    }

    #[test]
    fn non_diagonal_rejected() {
        let o = PauliTermSum::new(1, vec![(1.0, "X".parse().unwrap())]).unwrap();
        let r = apply_trex(&QuantumCircuit::new(1), &o, 2, &NoiseModel::noiseless(), ExecOptions::default(), 0);
        assert!(matches!(r, Err(Error::NonDiagonalObservable)));
    }
}
