//! Experiment configuration: a TOML file with a schema version, optionally
//! layered on a named preset.
//!
//! ```toml
//! schema_version = 1
//! preset = "paper-L10"
//! backend = "exact"
//!
//! [plan]
//! r_max = 6
//! ```
//!
//! Keys missing from both the file and the preset take the documented
//! defaults of [`ExperimentConfig::default`], which equal `paper-L10`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mitigation::{ExecOptions, MitigationPlan, NoiseModel};
use crate::model::{neel_operator, total_number_operator, total_sz_operator, HubbardParams, PauliTermSum};
use crate::trotter::{TrotterOrder, TrotterPlan};

pub const SCHEMA_VERSION: u32 = 1;

pub const PRESETS: [&str; 3] = ["paper-L10", "paper-L52-mps", "noisy-L4"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Statevector,
    Exact,
    Mps,
    Noisy,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Statevector => "statevector",
            Backend::Exact => "exact",
            Backend::Mps => "mps",
            Backend::Noisy => "noisy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    Neel,
    NTot,
    SzTot,
}

impl ObservableKind {
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::Neel => "neel",
            ObservableKind::NTot => "n_tot",
            ObservableKind::SzTot => "sz_tot",
        }
    }

    pub fn operator(self, sites: usize) -> Result<PauliTermSum> {
        match self {
            ObservableKind::Neel => neel_operator(sites),
            ObservableKind::NTot => total_number_operator(sites),
            ObservableKind::SzTot => total_sz_operator(sites),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConfig {
    pub order: TrotterOrder,
    pub r_min: usize,
    pub r_max: usize,
    pub dt: f64,
    pub prepare_neel: bool,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self { order: TrotterOrder::First, r_min: 1, r_max: 10, dt: 0.5, prepare_neel: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MpsConfig {
    pub chi_max: usize,
    pub cutoff: f64,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self { chi_max: 1000, cutoff: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactConfig {
    pub tol: f64,
    pub krylov_dim: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { tol: crate::tolerance::KRYLOV_TOL, krylov_dim: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Limits {
    pub statevector_qubits: usize,
    pub exact_qubits: usize,
    pub noisy_qubits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { statevector_qubits: 26, exact_qubits: 24, noisy_qubits: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub model: HubbardParams,
    pub plan: PlanConfig,
    pub backend: Backend,
    /// First entry is the primary observable for plot data.
    pub observables: Vec<ObservableKind>,
    /// Repeats per point for stochastic backends.
    pub instances: usize,
    pub seed: u64,
    pub mps: MpsConfig,
    pub exact: ExactConfig,
    pub noise: NoiseModel,
    /// Run the mitigation stack on the noisy backend.
    pub mitigate: bool,
    pub mitigation: MitigationPlan,
    pub exec: ExecOptions,
    pub output: OutputConfig,
    pub limits: Limits,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            preset: None,
            model: HubbardParams::new(10, 1.0, 1.0),
            plan: PlanConfig::default(),
            backend: Backend::Statevector,
            observables: vec![ObservableKind::Neel, ObservableKind::NTot, ObservableKind::SzTot],
            instances: 5,
            seed: 1,
            mps: MpsConfig::default(),
            exact: ExactConfig::default(),
            noise: NoiseModel::device_scale(),
            mitigate: true,
            mitigation: MitigationPlan::default(),
            exec: ExecOptions::default(),
            output: OutputConfig::default(),
            limits: Limits::default(),
        }
    }
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ExperimentConfig {
    /// Named starting points.
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = Self { preset: Some(name.to_string()), ..Self::default() };
        match name {
            "paper-L10" => {}
            "paper-L52-mps" => {
                c.model = HubbardParams::new(52, 1.0, 1.0);
                c.plan.order = TrotterOrder::SecondOptimized;
                c.backend = Backend::Mps;
                c.observables = vec![ObservableKind::Neel];
            }
            "noisy-L4" => {
                c.model = HubbardParams::new(4, 1.0, 1.0);
                c.plan.r_max = 4;
                c.plan.dt = 0.25;
                c.backend = Backend::Noisy;
                c.observables = vec![ObservableKind::Neel];
                c.noise = NoiseModel { p1: 0.0, p2: 2.5e-3, p01: 6e-3, p10: 1.2e-2, readout: None };
                c.exec = ExecOptions { shots: 4000, shots_per_trajectory: 50 };
            }
            other => {
                return Err(Error::Config(format!("unknown preset {other:?}; known: {}", PRESETS.join(", "))));
            }
        }
        Ok(c)
    }

    pub fn from_toml_str(src: &str) -> Result<Self> {
        let file: toml::Value = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        let version = file.get("schema_version").and_then(|v| v.as_integer());
        match version {
            Some(v) if v == SCHEMA_VERSION as i64 => {}
            Some(v) => return Err(Error::Config(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}"))),
            None => return Err(Error::Config("missing schema_version".into())),
        }
        let base = match file.get("preset").and_then(|p| p.as_str()) {
            Some(name) => Self::preset(name)?,
            None => Self::default(),
        };
        let mut merged = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut merged, file);
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Apply `HUBBARD_OUT_DIR` if set.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(dir) = std::env::var_os("HUBBARD_OUT_DIR") {
            self.output.dir = PathBuf::from(dir);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.model.validate().map_err(cfg)?;
        if self.plan.r_min == 0 || self.plan.r_max < self.plan.r_min {
            return Err(Error::Config(format!("invalid step range {}..={}", self.plan.r_min, self.plan.r_max)));
        }
        if !(self.plan.dt.is_finite() && self.plan.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.plan.dt)));
        }
        if self.observables.is_empty() {
            return Err(Error::Config("at least one observable required".into()));
        }
        if self.instances == 0 {
            return Err(Error::Config("instances must be at least 1".into()));
        }
        if self.mps.chi_max == 0 || !(0.0..1.0).contains(&self.mps.cutoff) {
            return Err(Error::Config("mps.chi_max must be positive and mps.cutoff in [0, 1)".into()));
        }
        if self.exact.tol.is_nan() || self.exact.tol <= 0.0 || self.exact.krylov_dim < 2 {
            return Err(Error::Config("exact.tol must be positive and exact.krylov_dim ≥ 2".into()));
        }
        self.noise.validate().map_err(cfg)?;
        self.mitigation.validate().map_err(cfg)?;
        self.exec.validate().map_err(cfg)?;
        Ok(())
    }

    pub fn trotter_plan(&self, steps: usize) -> TrotterPlan {
        TrotterPlan { order: self.plan.order, steps, dt: self.plan.dt, params: self.model, prepare_neel: self.plan.prepare_neel }
    }

    pub fn steps(&self) -> std::ops::RangeInclusive<usize> {
        self.plan.r_min..=self.plan.r_max
    }

    /// Reject widths beyond the backend's configured cap.
    pub fn check_capacity(&self) -> Result<()> {
        let n = self.model.num_qubits();
        let cap = match self.backend {
            Backend::Statevector => Some(self.limits.statevector_qubits),
            Backend::Exact => Some(self.limits.exact_qubits),
            Backend::Noisy => Some(self.limits.noisy_qubits),
            Backend::Mps => None,
        };
        match cap {
            Some(cap) if n > cap => Err(Error::Capacity { backend: self.backend.name(), width: n, cap }),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let c = ExperimentConfig::preset("paper-L10").unwrap();
        assert_eq!(c.model, HubbardParams::new(10, 1.0, 1.0));
        assert_eq!((c.plan.r_min, c.plan.r_max, c.plan.dt), (1, 10, 0.5));
        assert!((c.plan.r_max as f64 * c.plan.dt - 5.0).abs() < 1e-15);
        assert!(ExperimentConfig::preset("nope").is_err());
    }

    #[test]
    fn file_overrides_preset() {
        let c = ExperimentConfig::from_toml_str(
            "schema_version = 1\npreset = \"paper-L10\"\nbackend = \"exact\"\n[plan]\nr_max = 4\n[model]\nsites = 3\n",
        )
        .unwrap();
        assert_eq!(c.backend, Backend::Exact);
        assert_eq!(c.plan.r_max, 4);
        assert_eq!(c.plan.dt, 0.5);
        assert_eq!(c.model.sites, 3);
        assert_eq!(c.model.t, 1.0);
    }

    #[test]
    fn round_trip() {
        for name in PRESETS {
            let c = ExperimentConfig::preset(name).unwrap();
            let text = c.to_toml_string().unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
        }
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(ExperimentConfig::from_toml_str("backend = \"exact\""), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("schema_version = 2"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("schema_version = 1\nbogus = 3"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("schema_version = 1\n[plan]\nr_min = 0"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("schema_version = 1\nbackend = \"gpu\""), Err(Error::Config(_))));
    }

    #[test]
    fn capacity_checks() {
        let mut c = ExperimentConfig::default();
        c.model.sites = 14;
        assert!(matches!(c.check_capacity(), Err(Error::Capacity { .. })));
        c.backend = Backend::Mps;
        assert!(c.check_capacity().is_ok());
        c.backend = Backend::Exact;
        c.model.sites = 12;
        assert!(c.check_capacity().is_ok());
        c.model.sites = 13;
        assert!(c.check_capacity().is_err());
    }
}
