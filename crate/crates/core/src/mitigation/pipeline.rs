//! The composed mitigation stack: DD insertion, Pauli twirling, CZ folding,
//! TREX measurement, averaging over twirls and zero-noise extrapolation.

use serde::{Deserialize, Serialize};

use super::dd::{insert_dd, GateDurations};
use super::noise::{measurement_groups, noisy_expectation, ExecOptions, MeasurementGroup, NoiseModel};
use super::trex::{calibrated_sum, parity_means, random_masks};
use super::twirl::pauli_twirl;
use super::zne::{extrapolate, fold_cz, validate_factors, ZneFit, ZneResult};
use crate::circuit::{decompose_to_basis, QuantumCircuit};
use crate::error::{Error, Result};
use crate::model::PauliTermSum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MitigationPlan {
    pub trex: bool,
    pub trex_samples: usize,
    pub twirl: bool,
    pub twirl_instances: usize,
    pub zne_factors: Vec<u32>,
    pub zne_fit: ZneFit,
    pub dd: bool,
    pub durations: GateDurations,
}

impl Default for MitigationPlan {
    fn default() -> Self {
        Self {
            trex: true,
            trex_samples: 10,
            twirl: true,
            twirl_instances: 10,
            zne_factors: vec![1, 3, 5],
            zne_fit: ZneFit::Linear,
            dd: true,
            durations: GateDurations::default(),
        }
    }
}

impl MitigationPlan {
    pub fn disabled() -> Self {
        Self { trex: false, twirl: false, zne_factors: vec![1], dd: false, ..Self::default() }
    }

    pub fn is_disabled(&self) -> bool {
        !self.trex && !self.twirl && !self.dd && self.zne_factors == [1]
    }

    pub fn validate(&self) -> Result<()> {
        validate_factors(&self.zne_factors)?;
        if self.trex_samples == 0 || self.twirl_instances == 0 {
            return Err(Error::InvalidParameter("TREX samples and twirl instances must be at least 1".into()));
        }
        self.durations.validate()
    }
}

/// Result of the mitigation stack for one circuit and observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigatedPoint {
    pub value: f64,
    pub zne: ZneResult,
    /// Standard deviation over twirl instances, per fold factor.
    pub twirl_spread: Vec<f64>,
    /// Readout calibration factor per measured term (empty without TREX).
    pub trex_factors: Vec<f64>,
    pub dd_filled: usize,
    pub dd_skipped: usize,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Measurement {
    groups: Vec<MeasurementGroup>,
    masks: Vec<u64>,
    /// calibration factors per group and term
    factors: Option<Vec<Vec<f64>>>,
    offset: f64,
}

fn estimate(
    circuit: &QuantumCircuit,
    m: &Measurement,
    noise: &NoiseModel,
    opts: ExecOptions,
    seed: u64,
    path: &[u64],
) -> Result<f64> {
    let mut total = m.offset;
    for (g, group) in m.groups.iter().enumerate() {
        let mut c = circuit.clone();
        c.append(&group.rotation)?;
        let mut p = path.to_vec();
        p.push(g as u64);
        let means = parity_means(&c, &group.terms, &m.masks, noise, opts, seed, &p)?;
        total += match &m.factors {
            Some(f) => calibrated_sum(&group.terms, &means, &f[g])?,
            None => group.terms.iter().zip(&means).map(|(&(coef, _), v)| coef * v).sum(),
        };
    }
    Ok(total)
}

/// Twirling, folding and TREX per plan, then extrapolation. No DD.
pub fn zne_estimate(
    c: &QuantumCircuit,
    o: &PauliTermSum,
    noise: &NoiseModel,
    plan: &MitigationPlan,
    opts: ExecOptions,
    seed: u64,
) -> Result<MitigatedPoint> {
    let plan = MitigationPlan { dd: false, ..plan.clone() };
    mitigated_pipeline(c, o, noise, &plan, opts, seed)
}

/// Full stack. `opts.shots` is the budget for each executed circuit (one per
/// twirl instance, fold factor and measurement group).
pub fn mitigated_pipeline(
    c: &QuantumCircuit,
    o: &PauliTermSum,
    noise: &NoiseModel,
    plan: &MitigationPlan,
    opts: ExecOptions,
    seed: u64,
) -> Result<MitigatedPoint> {
    plan.validate()?;
    if o.num_qubits() != c.num_qubits() {
        return Err(Error::WidthMismatch { expected: c.num_qubits(), actual: o.num_qubits() });
    }
    let n = c.num_qubits();
    let mut base = decompose_to_basis(c)?;
    if plan.is_disabled() {
        let value = noisy_expectation(&base, o, noise, opts, seed)?;
        return Ok(MitigatedPoint {
            value,
            zne: extrapolate(&[1], &[value], plan.zne_fit)?,
            twirl_spread: vec![0.0],
            trex_factors: Vec::new(),
            dd_filled: 0,
            dd_skipped: 0,
        });
    }
    let (mut dd_filled, mut dd_skipped) = (0, 0);
    if plan.dd {
        let (with_dd, report) = insert_dd(&base, &plan.durations)?;
        base = with_dd;
        dd_filled = report.filled();
        dd_skipped = report.skipped();
    }
    let instances = if plan.twirl { pauli_twirl(&base, plan.twirl_instances, seed)? } else { vec![base] };
    let groups = measurement_groups(o)?;
    let masks = if plan.trex { random_masks(n, plan.trex_samples, seed, &[1]) } else { Vec::new() };
    let factors = if plan.trex {
        let empty = QuantumCircuit::new(n);
        let f = groups
            .iter()
            .enumerate()
            .map(|(g, group)| parity_means(&empty, &group.terms, &masks, noise, opts, seed, &[2, g as u64]))
            .collect::<Result<Vec<_>>>()?;
        Some(f)
    } else {
        None
    };
    let trex_factors = factors.iter().flatten().flatten().copied().collect();
    let m = Measurement { groups, masks, factors, offset: o.identity_coefficient() };
    let mut means = Vec::with_capacity(plan.zne_factors.len());
    let mut twirl_spread = Vec::with_capacity(plan.zne_factors.len());
    for (fi, &k) in plan.zne_factors.iter().enumerate() {
        let mut values = Vec::with_capacity(instances.len());
        for (ti, inst) in instances.iter().enumerate() {
            let folded = fold_cz(inst, k)?;
            values.push(estimate(&folded, &m, noise, opts, seed, &[3, fi as u64, ti as u64])?);
        }
        let (mean, std) = mean_std(&values);
        means.push(mean);
        twirl_spread.push(std);
    }
    let zne = extrapolate(&plan.zne_factors, &means, plan.zne_fit)?;
    Ok(MitigatedPoint { value: zne.value, zne, twirl_spread, trex_factors, dd_filled, dd_skipped })
}
