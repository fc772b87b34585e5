//! Depth tables and tidy CSV plot data.
//!
//! | file | header |
//! |---|---|
//! | `<obs>_vs_time.csv` | `tau,value` (deterministic backends) or `tau,value,std` (noisy) |
//! | `depth_<order>.csv` | `r,depth,cz_depth,cz_count` |
//! | `mps_diagnostics.csv` | `tau,max_link_dim,max_trunc_err,sweep_seconds` |
//! | `mps_truncation.csv` | `step,link,eps,chi` |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{Backend, ExperimentConfig};
use super::run::{ResultSet, Timings};
use crate::circuit::{decompose_to_basis, depth, gate_counts, GateKind};
use crate::error::{Error, Result};
use crate::trotter::{build_circuit, convention_depth, TrotterOrder, TrotterPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthRow {
    pub order: TrotterOrder,
    pub r: usize,
    pub depth: usize,
    pub cz_depth: usize,
    pub cz_count: usize,
}

/// Per-step depths of all three orders over the configured step range.
/// `depth` is measured on the Trotter steps without state preparation and
/// must agree with the closed form for this chain length and for `L = 4`.
pub fn depth_report(cfg: &ExperimentConfig) -> Result<Vec<DepthRow>> {
    let mut rows = Vec::new();
    for order in TrotterOrder::ALL {
        for r in cfg.steps() {
            let mut plan = TrotterPlan::new(order, r, cfg.plan.dt, cfg.model);
            let c = build_circuit(&plan)?;
            let measured = depth(&c, |_| true);
            plan.params.sites = 4;
            let reference = depth(&build_circuit(&plan)?, |_| true);
            let closed = convention_depth(order, r);
            if cfg.model.sites >= 3 && (measured != closed || reference != closed) {
                return Err(Error::Numerical(format!(
                    "{} depth at r={r}: measured {measured}, L=4 {reference}, expected {closed}",
                    order.name()
                )));
            }
            let basis = gate_counts(&decompose_to_basis(&c)?);
            rows.push(DepthRow {
                order,
                r,
                depth: measured,
                cz_depth: basis.two_qubit_depth,
                cz_count: basis.count(GateKind::CZ),
            });
        }
    }
    Ok(rows)
}

pub fn depth_csv(rows: &[DepthRow], order: TrotterOrder) -> String {
    let mut s = String::from("r,depth,cz_depth,cz_count\n");
    for row in rows.iter().filter(|row| row.order == order) {
        writeln!(s, "{},{},{},{}", row.r, row.depth, row.cz_depth, row.cz_count).unwrap();
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlotKind {
    NeelVsTime,
    DepthVsR,
    MpsDiagnostics,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::NeelVsTime, PlotKind::DepthVsR, PlotKind::MpsDiagnostics];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::NeelVsTime => "neel-vs-time",
            PlotKind::DepthVsR => "depth-vs-r",
            PlotKind::MpsDiagnostics => "mps-diagnostics",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown plot kind {s:?}")))
    }
}

/// CSV contents keyed by file name.
pub fn plot_tables(rs: &ResultSet, timings: Option<&Timings>, kind: PlotKind) -> Result<Vec<(String, String)>> {
    match kind {
        PlotKind::NeelVsTime => {
            let with_std = rs.config.backend == Backend::Noisy;
            let mut files = Vec::new();
            for &o in &rs.config.observables {
                let mut s = String::from(if with_std { "tau,value,std\n" } else { "tau,value\n" });
                for p in &rs.points {
                    let v = &p.observables[&o];
                    if with_std {
                        writeln!(s, "{},{},{}", p.tau, v.mean, v.std).unwrap();
                    } else {
                        writeln!(s, "{},{}", p.tau, v.mean).unwrap();
                    }
                }
                files.push((format!("{}_vs_time.csv", o.name()), s));
            }
            Ok(files)
        }
        PlotKind::DepthVsR => {
            let rows = depth_report(&rs.config)?;
            Ok(TrotterOrder::ALL
                .into_iter()
                .map(|o| (format!("depth_{}.csv", o.name()), depth_csv(&rows, o)))
                .collect())
        }
        PlotKind::MpsDiagnostics => {
            if rs.config.backend != Backend::Mps {
                return Ok(Vec::new());
            }
            let mut s = String::from("tau,max_link_dim,max_trunc_err,sweep_seconds\n");
            for p in &rs.points {
                let d = p.mps.as_ref().ok_or_else(|| Error::Config(format!("point r={} lacks MPS diagnostics", p.r)))?;
                let secs = timings.and_then(|t| t.sweep_seconds(p.r)).unwrap_or(f64::NAN);
                writeln!(s, "{},{},{:e},{}", p.tau, d.max_link_dim, d.max_trunc_err, secs).unwrap();
            }
            let mut files = vec![("mps_diagnostics.csv".to_string(), s)];
            if let Some(log) = &rs.truncation {
                files.push(("mps_truncation.csv".to_string(), log.to_csv()));
            }
            Ok(files)
        }
    }
}

/// Write the tables of `kind` into `dir`.
pub fn emit_plot_data(rs: &ResultSet, timings: Option<&Timings>, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, body) in plot_tables(rs, timings, kind)? {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_sweep;

    #[test]
    fn depth_rows_match_closed_forms() {
        let mut cfg = ExperimentConfig::default();
        cfg.plan.r_max = 5;
        let rows = depth_report(&cfg).unwrap();
        assert_eq!(rows.len(), 15);
        for row in &rows {
            assert_eq!(row.depth, convention_depth(row.order, row.r));
            assert!(row.cz_count > 0);
        }
        let csv = depth_csv(&rows, TrotterOrder::First);
        assert!(csv.starts_with("r,depth,cz_depth,cz_count\n1,23,"));
    }

    #[test]
    fn exact_neel_header() {
        let mut cfg = ExperimentConfig::default();
        cfg.model.sites = 2;
        cfg.plan.r_max = 2;
        cfg.backend = Backend::Exact;
        let out = run_sweep(&cfg).unwrap();
        let files = plot_tables(&out.results, None, PlotKind::NeelVsTime).unwrap();
        assert_eq!(files[0].0, "neel_vs_time.csv");
        assert!(files[0].1.starts_with("tau,value\n0.5,"));
        assert!(plot_tables(&out.results, None, PlotKind::MpsDiagnostics).unwrap().is_empty());
    }

    #[test]
    fn mps_panels() {
        let mut cfg = ExperimentConfig::default();
        cfg.model.sites = 3;
        cfg.plan.r_max = 3;
        cfg.backend = Backend::Mps;
        let out = run_sweep(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_plot_data(&out.results, Some(&out.timings), PlotKind::MpsDiagnostics, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau,max_link_dim,max_trunc_err,sweep_seconds"));
        assert_eq!(lines.count(), 3);
        assert!("mps-diagnostics".parse::<PlotKind>().is_ok());
        assert!("bogus".parse::<PlotKind>().is_err());
    }
}
