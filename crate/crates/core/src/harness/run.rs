//! Sweeps over Trotter step counts on the configured backend.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Backend, ExperimentConfig, ObservableKind};
use crate::circuit::{decompose_to_basis, depth, gate_counts, GateKind, QuantumCircuit};
use crate::error::{Error, Result};
use crate::exact::{KrylovOptions, SparseHamiltonian};
use crate::mitigation::{mitigated_pipeline, noisy_expectation, MitigatedPoint};
use crate::model::{build_hamiltonian, PauliTermSum};
use crate::mps::{mps_from_basis, MpsState, TruncationLog};
use crate::rng::derive_seed;
use crate::statevector::StateVector;
use crate::trotter::{build_circuit, convention_depth, schedule, TrotterPlan};

/// Mean and sample standard deviation over repeats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableValue {
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
}

impl ObservableValue {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std, values }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDepth {
    /// Depth of the Trotter steps alone, barriers separating blocks.
    pub convention_depth: usize,
    /// Depth of the full circuit including state preparation.
    pub circuit_depth: usize,
    pub cz_depth: usize,
    pub cz_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsDiagnostics {
    pub max_link_dim: usize,
    /// Largest single-split discarded weight within this step.
    pub max_trunc_err: f64,
    /// Discarded weight summed over every split up to this point.
    pub cumulative_discarded: f64,
    pub bond_dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovDiagnostics {
    pub substeps: usize,
    pub matvecs: usize,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPoint {
    pub r: usize,
    pub tau: f64,
    pub observables: BTreeMap<ObservableKind, ObservableValue>,
    pub depth: PointDepth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mps: Option<MpsDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub krylov: Option<KrylovDiagnostics>,
    /// Per observable, one entry per instance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mitigation: BTreeMap<ObservableKind, Vec<MitigatedPoint>>,
}

/// Everything a sweep computes except wall-clock time, so repeated runs with
/// one seed serialise to identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub config: ExperimentConfig,
    pub points: Vec<ExperimentPoint>,
    /// Per-split truncation records of the MPS backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationLog>,
}

impl ResultSet {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn point(&self, r: usize) -> Option<&ExperimentPoint> {
        self.points.iter().find(|p| p.r == r)
    }

    /// `(tau, mean)` of one observable.
    pub fn series(&self, o: ObservableKind) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| p.observables.get(&o).map(|v| (p.tau, v.mean))).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointTiming {
    pub r: usize,
    pub seconds: f64,
    /// Wall time of the MPS sweep for step `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_seconds: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub points: Vec<PointTiming>,
}

impl Timings {
    pub fn sweep_seconds(&self, r: usize) -> Option<f64> {
        self.points.iter().find(|p| p.r == r).and_then(|p| p.sweep_seconds)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub results: ResultSet,
    pub timings: Timings,
}

fn point_depth(cfg: &ExperimentConfig, plan: &TrotterPlan) -> Result<PointDepth> {
    let c = build_circuit(plan)?;
    let basis = decompose_to_basis(&c)?;
    let report = gate_counts(&basis);
    Ok(PointDepth {
        convention_depth: convention_depth(cfg.plan.order, plan.steps),
        circuit_depth: depth(&c, |_| true),
        cz_depth: report.two_qubit_depth,
        cz_count: report.count(GateKind::CZ),
    })
}

fn operators(cfg: &ExperimentConfig) -> Result<Vec<(ObservableKind, PauliTermSum)>> {
    cfg.observables.iter().map(|&o| Ok((o, o.operator(cfg.model.sites)?))).collect()
}

fn single(values: impl IntoIterator<Item = (ObservableKind, f64)>) -> BTreeMap<ObservableKind, ObservableValue> {
    values.into_iter().map(|(k, v)| (k, ObservableValue::from_values(vec![v]))).collect()
}

/// Run every point of the configured step range.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    cfg.check_capacity()?;
    let start = Instant::now();
    let mut out = match cfg.backend {
        Backend::Statevector => sweep_statevector(cfg)?,
        Backend::Exact => sweep_exact(cfg)?,
        Backend::Mps => sweep_mps(cfg)?,
        Backend::Noisy => sweep_noisy(cfg)?,
    };
    out.timings.total_seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

fn sweep_statevector(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let ops = operators(cfg)?;
    let sched = schedule(&cfg.trotter_plan(cfg.plan.r_max))?;
    let mut psi = StateVector::zeros(cfg.model.num_qubits())?;
    psi.apply_circuit(&sched.prefix)?;
    let mut points = Vec::new();
    let mut timings = Timings::default();
    for r in 1..=cfg.plan.r_max {
        let t0 = Instant::now();
        psi.apply_circuit(&sched.bodies[r - 1])?;
        if r < cfg.plan.r_min {
            continue;
        }
        let mut closed = psi.clone();
        closed.apply_circuit(&sched.closing)?;
        let values = ops.iter().map(|(k, o)| Ok((*k, closed.expectation(o)?))).collect::<Result<Vec<_>>>()?;
        points.push(ExperimentPoint {
            r,
            tau: r as f64 * cfg.plan.dt,
            observables: single(values),
            depth: point_depth(cfg, &cfg.trotter_plan(r))?,
            mps: None,
            krylov: None,
            mitigation: BTreeMap::new(),
        });
        timings.points.push(PointTiming { r, seconds: t0.elapsed().as_secs_f64(), sweep_seconds: None });
    }
    Ok(SweepOutput { results: ResultSet { config: cfg.clone(), points, truncation: None }, timings })
}

fn sweep_exact(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let ops = operators(cfg)?;
    let h = SparseHamiltonian::new(&build_hamiltonian(&cfg.model)?)?;
    let krylov = KrylovOptions { krylov_dim: cfg.exact.krylov_dim, tol: cfg.exact.tol, ..KrylovOptions::default() };
    let sched = schedule(&cfg.trotter_plan(cfg.plan.r_min))?;
    let mut psi = StateVector::zeros(cfg.model.num_qubits())?;
    psi.apply_circuit(&sched.prefix)?;
    let mut points = Vec::new();
    let mut timings = Timings::default();
    let mut done = 0;
    for r in cfg.steps() {
        let t0 = Instant::now();
        let (next, rep) = krylov.evolve(&h, &psi, (r - done) as f64 * cfg.plan.dt)?;
        psi = next;
        done = r;
        let values = ops.iter().map(|(k, o)| Ok((*k, psi.expectation(o)?))).collect::<Result<Vec<_>>>()?;
        points.push(ExperimentPoint {
            r,
            tau: r as f64 * cfg.plan.dt,
            observables: single(values),
            depth: point_depth(cfg, &cfg.trotter_plan(r))?,
            mps: None,
            krylov: Some(KrylovDiagnostics { substeps: rep.substeps, matvecs: rep.matvecs, error_estimate: rep.error_estimate }),
            mitigation: BTreeMap::new(),
        });
        timings.points.push(PointTiming { r, seconds: t0.elapsed().as_secs_f64(), sweep_seconds: None });
    }
    Ok(SweepOutput { results: ResultSet { config: cfg.clone(), points, truncation: None }, timings })
}

fn initial_mps(cfg: &ExperimentConfig, prefix: &QuantumCircuit) -> Result<MpsState> {
    let vacuum = crate::model::BasisState::zeros(cfg.model.num_qubits())?;
    let mut m = mps_from_basis(&vacuum, cfg.mps.chi_max, cfg.mps.cutoff)?;
    m.apply_circuit(prefix)?;
    Ok(m)
}

fn sweep_mps(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let ops = operators(cfg)?;
    let sched = schedule(&cfg.trotter_plan(cfg.plan.r_max))?;
    let mut m = initial_mps(cfg, &sched.prefix)?;
    let mut log = TruncationLog::default();
    let mut points = Vec::new();
    let mut timings = Timings::default();
    for r in 1..=cfg.plan.r_max {
        let t0 = Instant::now();
        let step_log = m.apply_circuit(&sched.bodies[r - 1])?;
        let sweep_seconds: f64 = step_log.sweeps.iter().map(|s| s.seconds).sum();
        let step_max = step_log.max_trunc_err();
        log.extend(step_log);
        if r < cfg.plan.r_min {
            continue;
        }
        let mut closed = m.clone();
        let close_log = closed.apply_circuit(&sched.closing)?;
        let values = ops.iter().map(|(k, o)| Ok((*k, closed.expectation(o)?))).collect::<Result<Vec<_>>>()?;
        points.push(ExperimentPoint {
            r,
            tau: r as f64 * cfg.plan.dt,
            observables: single(values),
            depth: point_depth(cfg, &cfg.trotter_plan(r))?,
            mps: Some(MpsDiagnostics {
                max_link_dim: closed.max_bond_dim(),
                max_trunc_err: step_max.max(close_log.max_trunc_err()),
                cumulative_discarded: log.cumulative_discarded() + close_log.cumulative_discarded(),
                bond_dims: closed.bond_dims(),
            }),
            krylov: None,
            mitigation: BTreeMap::new(),
        });
        timings.points.push(PointTiming { r, seconds: t0.elapsed().as_secs_f64(), sweep_seconds: Some(sweep_seconds) });
    }
    for rec in log.sweeps.iter_mut() {
        rec.seconds = 0.0;
    }
    Ok(SweepOutput { results: ResultSet { config: cfg.clone(), points, truncation: Some(log) }, timings })
}

struct NoisyRun {
    values: Vec<(ObservableKind, f64, Option<MitigatedPoint>)>,
    seconds: f64,
}

fn sweep_noisy(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let ops = operators(cfg)?;
    let circuits = cfg
        .steps()
        .map(|r| Ok((r, decompose_to_basis(&build_circuit(&cfg.trotter_plan(r))?)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = cfg.steps().flat_map(|r| (0..cfg.instances).map(move |i| (r, i))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(r, inst)| {
            let t0 = Instant::now();
            let c = &circuits[r - cfg.plan.r_min].1;
            let mut values = Vec::new();
            for (k, (kind, o)) in ops.iter().enumerate() {
                let seed = derive_seed(cfg.seed, &[r as u64, inst as u64, k as u64]);
                if cfg.mitigate {
                    let p = mitigated_pipeline(c, o, &cfg.noise, &cfg.mitigation, cfg.exec, seed)?;
                    values.push((*kind, p.value, Some(p)));
                } else {
                    values.push((*kind, noisy_expectation(c, o, &cfg.noise, cfg.exec, seed)?, None));
                }
            }
            Ok(NoisyRun { values, seconds: t0.elapsed().as_secs_f64() })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    let mut timings = Timings::default();
    for (idx, r) in cfg.steps().enumerate() {
        let batch = &runs[idx * cfg.instances..(idx + 1) * cfg.instances];
        let mut observables = BTreeMap::new();
        let mut mitigation = BTreeMap::new();
        for (k, (kind, _)) in ops.iter().enumerate() {
            let vals = batch.iter().map(|b| b.values[k].1).collect();
            observables.insert(*kind, ObservableValue::from_values(vals));
            if cfg.mitigate {
                let pts = batch.iter().filter_map(|b| b.values[k].2.clone()).collect();
                mitigation.insert(*kind, pts);
            }
        }
        points.push(ExperimentPoint {
            r,
            tau: r as f64 * cfg.plan.dt,
            observables,
            depth: point_depth(cfg, &cfg.trotter_plan(r))?,
            mps: None,
            krylov: None,
            mitigation,
        });
        timings.points.push(PointTiming { r, seconds: batch.iter().map(|b| b.seconds).sum(), sweep_seconds: None });
    }
    if points.iter().any(|p| p.observables.values().any(|v| !v.mean.is_finite())) {
        return Err(Error::Numerical("non-finite estimate in noisy sweep".into()));
    }
    Ok(SweepOutput { results: ResultSet { config: cfg.clone(), points, truncation: None }, timings })
}
