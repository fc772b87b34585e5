//! Circuits against dense split-operator products, and agreement between
//! simulation backends.

use hubbard_core::circuit::circuit_unitary;
use hubbard_core::harness::{run_sweep, Backend, ExperimentConfig, ObservableKind};
use hubbard_core::linalg::{expm_hermitian, matrix_diff_up_to_phase, CMatrix};
use hubbard_core::model::{build_hamiltonian, HubbardParams, PauliTermSum};
use hubbard_core::trotter::{build_circuit, TrotterOrder, TrotterPlan};

struct Parts {
    diagonal: CMatrix,
    even: CMatrix,
    odd: CMatrix,
}

fn parts(p: &HubbardParams) -> Parts {
    let h = build_hamiltonian(p).unwrap().without_identity();
    let n = h.num_qubits();
    let pick = |f: &dyn Fn(usize) -> bool| {
        let terms = h
            .terms()
            .iter()
            .filter(|(_, s)| {
                if s.is_diagonal() {
                    return f(usize::MAX);
                }
                let lo = s.support().next().unwrap();
                f(lo / 2)
            })
            .cloned()
            .collect();
        PauliTermSum::new(n, terms).unwrap().to_dense().unwrap()
    };
    Parts {
        diagonal: pick(&|b| b == usize::MAX),
        even: pick(&|b| b != usize::MAX && b % 2 == 0),
        odd: pick(&|b| b != usize::MAX && b % 2 == 1),
    }
}

fn step_unitary(order: TrotterOrder, p: &Parts, dt: f64) -> CMatrix {
    let e = |h: &CMatrix, t: f64| expm_hermitian(h, t);
    match order {
        TrotterOrder::First => e(&p.odd, dt) * e(&p.even, dt) * e(&p.diagonal, dt),
        _ => {
            e(&p.diagonal, dt / 2.0)
                * e(&p.even, dt / 2.0)
                * e(&p.odd, dt)
                * e(&p.even, dt / 2.0)
                * e(&p.diagonal, dt / 2.0)
        }
    }
}

#[test]
fn circuits_equal_split_operator_products() {
    let params = [
        HubbardParams::new(3, 1.0, 1.0),
        HubbardParams::new(3, 0.7, -1.3).with_chemical_potential(0.4, -0.2),
        HubbardParams::new(4, 1.1, 2.0).with_chemical_potential(0.1, 0.3),
    ];
    for p in params {
        let split = parts(&p);
        for order in TrotterOrder::ALL {
            for steps in 1..=3 {
                let dt = 0.37;
                let c = build_circuit(&TrotterPlan::new(order, steps, dt, p)).unwrap();
                let u = circuit_unitary(&c).unwrap();
                let one = step_unitary(order, &split, dt);
                let mut target = CMatrix::identity(u.nrows(), u.ncols());
                for _ in 0..steps {
                    target = &one * target;
                }
                let d = matrix_diff_up_to_phase(&u, &target);
                assert!(d < 1e-10, "{p:?} {order:?} r={steps}: {d}");
            }
        }
    }
}

fn config(backend: Backend, order: TrotterOrder, sites: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig { backend, ..ExperimentConfig::default() };
    c.plan.order = order;
    c.model.sites = sites;
    c.plan.r_max = 6;
    c.mps.cutoff = 0.0;
    c
}

#[test]
fn mps_matches_statevector_on_all_orders() {
    for order in TrotterOrder::ALL {
        let sv = run_sweep(&config(Backend::Statevector, order, 6)).unwrap().results;
        let mps = run_sweep(&config(Backend::Mps, order, 6)).unwrap().results;
        for (a, b) in sv.points.iter().zip(&mps.points) {
            for (k, v) in &a.observables {
                assert!((v.mean - b.observables[k].mean).abs() < 1e-9, "{order:?} r={} {k:?}", a.r);
            }
        }
    }
}

#[test]
fn sweeps_conserve_charges() {
    for sites in [4, 5] {
        let sz0 = if sites % 2 == 1 { 0.5 } else { 0.0 };
        for order in TrotterOrder::ALL {
            for backend in [Backend::Statevector, Backend::Exact, Backend::Mps] {
                let out = run_sweep(&config(backend, order, sites)).unwrap().results;
                for p in &out.points {
                    let n = p.observables[&ObservableKind::NTot].mean;
                    let sz = p.observables[&ObservableKind::SzTot].mean;
                    assert!((n - sites as f64).abs() < 1e-10, "{order:?} {backend:?} r={} N={n}", p.r);
                    assert!((sz - sz0).abs() < 1e-10, "{order:?} {backend:?} r={} Sz={sz}", p.r);
                }
            }
        }
    }
}

#[test]
fn trotter_curve_approaches_exact_as_dt_halves() {
    let mut errors = Vec::new();
    for (dt, r) in [(0.2, 5), (0.1, 10), (0.05, 20)] {
        let mut sv = config(Backend::Statevector, TrotterOrder::First, 4);
        sv.plan.dt = dt;
        sv.plan.r_min = r;
        sv.plan.r_max = r;
        let mut ex = sv.clone();
        ex.backend = Backend::Exact;
        let a = run_sweep(&sv).unwrap().results.points[0].observables[&ObservableKind::Neel].mean;
        let b = run_sweep(&ex).unwrap().results.points[0].observables[&ObservableKind::Neel].mean;
        errors.push((a - b).abs());
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}
