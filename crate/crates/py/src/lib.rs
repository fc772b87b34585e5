//! Python module `hubbard`: circuits, backends, mitigation and the sweep
//! harness of `hubbard-core`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use hubbard_core::circuit::{decompose_to_basis, depth, gate_counts, to_text, GateKind, QuantumCircuit};
use hubbard_core::exact::{evolve_exact, SparseHamiltonian};
use hubbard_core::harness::{run_sweep, ExperimentConfig, ObservableKind};
use hubbard_core::linalg::C64;
use hubbard_core::mitigation::{
    cz_twirl_set, fold_cz, mitigated_pipeline, noisy_expectation, pauli_twirl, ExecOptions, MitigationPlan,
    NoiseModel,
};
use hubbard_core::model::{self, neel_state, PauliTermSum};
use hubbard_core::mps::{mps_from_basis, MpsState};
use hubbard_core::statevector;
use hubbard_core::trotter::{self, TrotterOrder, TrotterPlan};
use hubbard_core::Error;

create_exception!(hubbard, HubbardError, PyException);
create_exception!(hubbard, ConfigError, HubbardError);
create_exception!(hubbard, CapacityError, HubbardError);
create_exception!(hubbard, NumericalError, HubbardError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Config(_) | Error::Parse(_) | Error::InvalidParameter(_) => ConfigError::new_err(msg),
        Error::Capacity { .. } | Error::UnsupportedGate(_) | Error::NonAdjacentGate(..) => CapacityError::new_err(msg),
        Error::Numerical(_) | Error::FitFailure(_) => NumericalError::new_err(msg),
        _ => HubbardError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for hubbard_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn parse_order(name: &str) -> PyResult<TrotterOrder> {
    TrotterOrder::ALL
        .into_iter()
        .find(|o| o.name() == name)
        .ok_or_else(|| ConfigError::new_err(format!("unknown order {name:?}; expected first, second or second-optimized")))
}

fn observable(name: &str, sites: usize) -> PyResult<PauliTermSum> {
    let kind = match name {
        "neel" => ObservableKind::Neel,
        "n_tot" => ObservableKind::NTot,
        "sz_tot" => ObservableKind::SzTot,
        _ => return Err(ConfigError::new_err(format!("unknown observable {name:?}; expected neel, n_tot or sz_tot"))),
    };
    kind.operator(sites).py()
}

fn sites_of(num_qubits: usize) -> usize {
    num_qubits / 2
}

#[pyclass(name = "HubbardParams", from_py_object)]
#[derive(Clone)]
struct PyParams(model::HubbardParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (sites, t = 1.0, u = 1.0, mu_up = 0.0, mu_down = 0.0))]
    fn new(sites: usize, t: f64, u: f64, mu_up: f64, mu_down: f64) -> PyResult<Self> {
        let p = model::HubbardParams::new(sites, t, u).with_chemical_potential(mu_up, mu_down);
        p.validate().py()?;
        Ok(Self(p))
    }

    #[getter]
    fn sites(&self) -> usize {
        self.0.sites
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    /// Qubit Hamiltonian as `(coefficient, letters)` pairs, qubit 0 leftmost.
    fn hamiltonian(&self) -> PyResult<Vec<(f64, String)>> {
        let h = model::build_hamiltonian(&self.0).py()?;
        Ok(h.terms().iter().map(|(c, s)| (*c, s.letters().iter().map(|p| p.letter()).collect())).collect())
    }

    fn __repr__(&self) -> String {
        format!("HubbardParams(sites={}, t={}, u={})", self.0.sites, self.0.t, self.0.u)
    }
}

#[pyclass(name = "Circuit", from_py_object)]
#[derive(Clone)]
struct PyCircuit(QuantumCircuit);

#[pymethods]
impl PyCircuit {
    /// `r` Trotter steps of size `dt`.
    #[staticmethod]
    #[pyo3(signature = (params, order, r, dt, prepare_neel = true))]
    fn trotter(params: &PyParams, order: &str, r: usize, dt: f64, prepare_neel: bool) -> PyResult<Self> {
        let mut plan = TrotterPlan::new(parse_order(order)?, r, dt, params.0);
        if prepare_neel {
            plan = plan.with_neel_preparation();
        }
        Ok(Self(trotter::build_circuit(&plan).py()?))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self(QuantumCircuit::from_json(s).py()?))
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn depth(&self) -> usize {
        depth(&self.0, |_| true)
    }

    /// Gate counts by kind name, plus `depth` and `two_qubit_depth`.
    fn counts(&self) -> Vec<(String, usize)> {
        let r = gate_counts(&self.0);
        let mut out = vec![("depth".to_string(), r.depth), ("two_qubit_depth".to_string(), r.two_qubit_depth)];
        out.extend(r.counts.iter().map(|(k, n)| (k.name().to_string(), *n)));
        out
    }

    fn cz_count(&self) -> usize {
        gate_counts(&self.0).count(GateKind::CZ)
    }

    /// Native-basis version {X, SX, RX, RZ, CZ, RZZ}.
    fn to_basis(&self) -> PyResult<Self> {
        Ok(Self(decompose_to_basis(&self.0).py()?))
    }

    /// Global folding of every CZ to `k` copies (odd `k`).
    fn fold(&self, k: u32) -> PyResult<Self> {
        Ok(Self(fold_cz(&self.0, k).py()?))
    }

    fn twirl(&self, instances: usize, seed: u64) -> PyResult<Vec<Self>> {
        Ok(pauli_twirl(&self.0, instances, seed).py()?.into_iter().map(Self).collect())
    }

    fn to_text(&self) -> String {
        to_text(&self.0)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().py()
    }
}

#[pyclass(name = "StateVector")]
struct PyStateVector(statevector::StateVector);

#[pymethods]
impl PyStateVector {
    #[staticmethod]
    fn zeros(num_qubits: usize) -> PyResult<Self> {
        Ok(Self(statevector::StateVector::zeros(num_qubits).py()?))
    }

    /// Néel product state, spin up on even sites.
    #[staticmethod]
    fn neel(sites: usize) -> PyResult<Self> {
        Ok(Self(statevector::StateVector::from_basis(&neel_state(sites).py()?).py()?))
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn apply(&mut self, circuit: &PyCircuit) -> PyResult<()> {
        self.0.apply_circuit(&circuit.0).py()
    }

    /// `observable` is one of `neel`, `n_tot`, `sz_tot`.
    fn expectation(&self, observable: &str) -> PyResult<f64> {
        let o = self::observable(observable, sites_of(self.0.num_qubits()))?;
        self.0.expectation(&o).py()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.0.amplitudes().to_vec()
    }

    fn inner(&self, other: &PyStateVector) -> PyResult<C64> {
        self.0.inner(&other.0).py()
    }

    /// Exact evolution under the Hubbard Hamiltonian for time `tau`.
    #[pyo3(signature = (params, tau, tol = 1e-12))]
    fn evolve_exact(&self, params: &PyParams, tau: f64, tol: f64) -> PyResult<Self> {
        let h = SparseHamiltonian::new(&model::build_hamiltonian(&params.0).py()?).py()?;
        Ok(Self(evolve_exact(&h, &self.0, tau, tol).py()?))
    }
}

#[pyclass(name = "Mps")]
struct PyMps {
    state: MpsState,
    discarded: f64,
}

#[pymethods]
impl PyMps {
    #[staticmethod]
    #[pyo3(signature = (sites, chi_max = 1000, cutoff = 1e-8))]
    fn neel(sites: usize, chi_max: usize, cutoff: f64) -> PyResult<Self> {
        let state = mps_from_basis(&neel_state(sites).py()?, chi_max, cutoff).py()?;
        Ok(Self { state, discarded: 0.0 })
    }

    /// Applies the circuit; returns the largest single-split discarded weight.
    fn apply(&mut self, circuit: &PyCircuit) -> PyResult<f64> {
        let log = self.state.apply_circuit(&circuit.0).py()?;
        self.discarded += log.cumulative_discarded();
        Ok(log.max_trunc_err())
    }

    fn expectation(&self, observable: &str) -> PyResult<f64> {
        let o = self::observable(observable, sites_of(self.state.num_qubits()))?;
        self.state.expectation(&o).py()
    }

    fn bond_dims(&self) -> Vec<usize> {
        self.state.bond_dims()
    }

    #[getter]
    fn cumulative_discarded(&self) -> f64 {
        self.discarded
    }

    fn amplitudes(&self) -> PyResult<Vec<C64>> {
        self.state.to_amplitudes().py()
    }
}

/// Paper-convention depth of `r` steps: 23r, 46r or 33r+4.
#[pyfunction]
fn convention_depth(order: &str, r: usize) -> PyResult<usize> {
    Ok(trotter::convention_depth(parse_order(order)?, r))
}

/// The 16 Pauli quadruples that leave CZ invariant, as letter strings.
#[pyfunction]
fn cz_twirls() -> Vec<String> {
    cz_twirl_set().iter().map(|q| q.iter().map(|p| p.letter()).collect()).collect()
}

fn noise_model(p1: f64, p2: f64, p01: f64, p10: f64) -> PyResult<NoiseModel> {
    let n = NoiseModel { p1, p2, p01, p10, readout: None };
    n.validate().py()?;
    Ok(n)
}

/// Noisy shot-based estimate of `observable`, optionally through the full
/// mitigation stack (TREX, twirling, ZNE, DD).
#[pyfunction]
#[pyo3(signature = (circuit, observable, p1 = 0.0, p2 = 0.0, p01 = 0.0, p10 = 0.0, shots = 4000, seed = 1, mitigate = false))]
#[allow(clippy::too_many_arguments)]
fn noisy_estimate(
    circuit: &PyCircuit,
    observable: &str,
    p1: f64,
    p2: f64,
    p01: f64,
    p10: f64,
    shots: u64,
    seed: u64,
    mitigate: bool,
) -> PyResult<f64> {
    let o = self::observable(observable, sites_of(circuit.0.num_qubits()))?;
    let noise = noise_model(p1, p2, p01, p10)?;
    let opts = ExecOptions { shots, ..ExecOptions::default() };
    if mitigate {
        Ok(mitigated_pipeline(&circuit.0, &o, &noise, &MitigationPlan::default(), opts, seed).py()?.value)
    } else {
        let basis = decompose_to_basis(&circuit.0).py()?;
        noisy_expectation(&basis, &o, &noise, opts, seed).py()
    }
}

/// Runs a step sweep from a preset name or TOML text; returns results JSON.
#[pyfunction]
#[pyo3(signature = (preset = None, toml = None))]
fn run_experiment(preset: Option<&str>, toml: Option<&str>) -> PyResult<String> {
    let cfg = match (preset, toml) {
        (Some(_), Some(_)) => return Err(ConfigError::new_err("give either a preset or a TOML document")),
        (_, Some(src)) => ExperimentConfig::from_toml_str(src).py()?,
        (Some(name), None) => ExperimentConfig::preset(name).py()?,
        (None, None) => ExperimentConfig::default(),
    };
    let out = run_sweep(&cfg).py()?;
    out.results.to_json().py()
}

#[pymodule]
fn hubbard(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("HubbardError", py.get_type::<HubbardError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("CapacityError", py.get_type::<CapacityError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyMps>()?;
    m.add_function(wrap_pyfunction!(convention_depth, m)?)?;
    m.add_function(wrap_pyfunction!(cz_twirls, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
