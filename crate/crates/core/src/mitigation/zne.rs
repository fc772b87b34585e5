//! Zero-noise extrapolation by CZ folding.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, QuantumCircuit};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZneFit {
    #[default]
    Linear,
    Quadratic,
    /// `y = a·b^k`, fitted linearly in `log|y|`; needs values of one sign.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    pub value: f64,
    pub factors: Vec<u32>,
    pub raw: Vec<f64>,
    pub fit: ZneFit,
    /// Fit coefficients, lowest order first (`[log a, log b]` for the
    /// exponential model).
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual of the fit at the measured factors.
    pub residual: f64,
}

/// Replace every CZ by `k` copies (`k` odd). Since CZ is its own inverse
/// this is local unitary folding `G (G† G)^{(k-1)/2}`.
pub fn fold_cz(c: &QuantumCircuit, k: u32) -> Result<QuantumCircuit> {
    if k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("fold factor {k} must be odd")));
    }
    let mut out = QuantumCircuit::new(c.num_qubits());
    for (g, &tag) in c.gates().iter().zip(c.tags()) {
        out.set_tag(tag);
        let reps = if g.kind() == GateKind::CZ { k } else { 1 };
        for _ in 0..reps {
            out.push(*g)?;
        }
    }
    Ok(out)
}

pub fn validate_factors(factors: &[u32]) -> Result<()> {
    if factors.first() != Some(&1) {
        return Err(Error::InvalidParameter("fold factors must start at 1".into()));
    }
    if factors.windows(2).any(|w| w[1] <= w[0]) || factors.iter().any(|k| k % 2 == 0) {
        return Err(Error::InvalidParameter(format!("fold factors {factors:?} must be odd and ascending")));
    }
    Ok(())
}

fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    if x.len() <= degree {
        return Err(Error::FitFailure(format!("{} points cannot determine a degree-{degree} fit", x.len())));
    }
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest < 1e-12 {
        return Err(Error::FitFailure("degenerate fold factors".into()));
    }
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::FitFailure(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

fn eval(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Extrapolate raw values measured at `factors` to factor 0. A single factor
/// returns its raw value unchanged.
pub fn extrapolate(factors: &[u32], raw: &[f64], fit: ZneFit) -> Result<ZneResult> {
    if factors.len() != raw.len() || factors.is_empty() {
        return Err(Error::FitFailure("one raw value per fold factor required".into()));
    }
    let x: Vec<f64> = factors.iter().map(|&k| k as f64).collect();
    if factors.len() == 1 {
        return Ok(ZneResult {
            value: raw[0],
            factors: factors.to_vec(),
            raw: raw.to_vec(),
            fit,
            coefficients: vec![raw[0]],
            residual: 0.0,
        });
    }
    let (value, coefficients, fitted): (f64, Vec<f64>, Vec<f64>) = match fit {
        ZneFit::Linear | ZneFit::Quadratic => {
            let degree = if fit == ZneFit::Linear { 1 } else { 2 };
            let coef = polyfit(&x, raw, degree)?;
            let fitted = x.iter().map(|&k| eval(&coef, k)).collect();
            (coef[0], coef, fitted)
        }
        ZneFit::Exponential => {
            let sign = raw[0].signum();
            if raw.iter().any(|&v| v == 0.0 || v.signum() != sign) {
                return Err(Error::FitFailure(format!("exponential fit needs values of one sign, got {raw:?}")));
            }
            let logs: Vec<f64> = raw.iter().map(|v| v.abs().ln()).collect();
            let coef = polyfit(&x, &logs, 1)?;
            let fitted = x.iter().map(|&k| sign * eval(&coef, k).exp()).collect();
            (sign * coef[0].exp(), coef, fitted)
        }
    };
    if !value.is_finite() {
        return Err(Error::FitFailure(format!("non-finite extrapolation from {raw:?}")));
    }
    let residual = (fitted.iter().zip(raw).map(|(f, r)| (f - r).powi(2)).sum::<f64>() / raw.len() as f64).sqrt();
    Ok(ZneResult { value, factors: factors.to_vec(), raw: raw.to_vec(), fit, coefficients, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, Gate};
    use crate::linalg::matrix_diff_up_to_phase;

    #[test]
    fn folding_multiplies_cz_only() {
        let mut c = QuantumCircuit::new(2);
        c.push(Gate::sx(0)).unwrap();
        c.push(Gate::cz(0, 1)).unwrap();
        c.push(Gate::rz(1, 0.2)).unwrap();
        let f = fold_cz(&c, 5).unwrap();
        assert_eq!(f.len(), 7);
        assert!(matrix_diff_up_to_phase(&circuit_unitary(&f).unwrap(), &circuit_unitary(&c).unwrap()) < 1e-12);
        assert!(fold_cz(&c, 2).is_err());
    }

    #[test]
    fn fits_recover_models() {
        let f = [1, 3, 5];
        let lin = extrapolate(&f, &[0.9, 0.7, 0.5], ZneFit::Linear).unwrap();
        assert!((lin.value - 1.0).abs() < 1e-12);
        let quad: Vec<f64> = f.iter().map(|&k| 1.0 - 0.1 * k as f64 + 0.01 * (k * k) as f64).collect();
        assert!((extrapolate(&f, &quad, ZneFit::Quadratic).unwrap().value - 1.0).abs() < 1e-12);
        let exp: Vec<f64> = f.iter().map(|&k| -0.4 * 0.8f64.powi(k as i32)).collect();
        assert!((extrapolate(&f, &exp, ZneFit::Exponential).unwrap().value + 0.4).abs() < 1e-12);
        assert!(matches!(extrapolate(&f, &[0.1, -0.1, 0.2], ZneFit::Exponential), Err(Error::FitFailure(_))));
    }

    #[test]
    fn constant_values_extrapolate_to_themselves() {
        for fit in [ZneFit::Linear, ZneFit::Quadratic, ZneFit::Exponential] {
            assert!((extrapolate(&[1, 3, 5], &[0.3; 3], fit).unwrap().value - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn single_factor_is_raw() {
        let r = extrapolate(&[1], &[0.123], ZneFit::Quadratic).unwrap();
        assert_eq!(r.value, 0.123);
    }

    #[test]
    fn factor_validation() {
        assert!(validate_factors(&[1, 3, 5]).is_ok());
        assert!(validate_factors(&[3, 5]).is_err());
        assert!(validate_factors(&[1, 2]).is_err());
        assert!(validate_factors(&[1, 5, 3]).is_err());
        assert!(matches!(extrapolate(&[1, 3], &[0.2, 0.1], ZneFit::Quadratic), Err(Error::FitFailure(_))));
    }
}
