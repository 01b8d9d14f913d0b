//! Least-squares extraction of small-t asymptotic coefficients from heat
//! content samples, on the exponent families t^n and t^{(1+j-α₁-α₂)/2}.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Smallest admissible gap between two fitted exponents.
pub const DEFAULT_GAP_MIN: f64 = 0.05;
/// Largest number of simultaneously fitted terms.
pub const MAX_TERMS: usize = 6;
/// Condition number above which a fit is rejected.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub beta: f64,
    pub err: f64,
}

/// Samples of β(t) with strictly increasing t.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeatContentSamples {
    pub problem: String,
    pub entries: Vec<Sample>,
}

impl HeatContentSamples {
    pub fn new(problem: impl Into<String>, entries: Vec<Sample>) -> Result<Self> {
        for w in entries.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Validation("sample times must be strictly increasing".into()));
            }
        }
        if entries
            .iter()
            .any(|s| !(s.t > 0.0) || !s.beta.is_finite() || !(s.err >= 0.0))
        {
            return Err(Error::Validation("samples need t > 0, finite β and err ≥ 0".into()));
        }
        Ok(Self {
            problem: problem.into(),
            entries,
        })
    }

    /// Builds samples from parallel arrays with zero error estimates.
    pub fn from_values(problem: impl Into<String>, ts: &[f64], betas: &[f64]) -> Result<Self> {
        if ts.len() != betas.len() {
            return Err(Error::Validation("t and β lists differ in length".into()));
        }
        let entries = ts
            .iter()
            .zip(betas)
            .map(|(t, b)| Sample {
                t: *t,
                beta: *b,
                err: 0.0,
            })
            .collect();
        Self::new(problem, entries)
    }
}

/// n_points geometrically spaced times on [t_min, t_max].
pub fn geometric_grid(t_min: f64, t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && n_points >= 2) {
        return Err(Error::Validation(
            "grid needs 0 < t_min < t_max and at least two points".into(),
        ));
    }
    let r = (t_max / t_min).ln() / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                t_max
            } else {
                t_min * (r * i as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Root-mean-square relative misfit.
    #[serde(rename = "residual")]
    pub fit_residual: f64,
    #[serde(rename = "condition")]
    pub condition_estimate: f64,
}

impl AsymptoticModel {
    pub fn eval(&self, t: f64) -> f64 {
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(g, c)| c * t.powf(*g))
            .sum()
    }

    /// Coefficient of the exponent closest to `gamma`, if within 1e-9.
    pub fn coefficient(&self, gamma: f64) -> Option<f64> {
        self.exponents
            .iter()
            .position(|g| (g - gamma).abs() < 1e-9)
            .map(|i| self.coefficients[i])
    }
}

/// What to fit: `interior_terms` powers t^0, t^1, … and `boundary_terms`
/// powers t^{(1+j-α₁-α₂)/2}, j = 0, 1, …; with `known_interior` the interior
/// series Σ β_n t^n is subtracted first and only the boundary family is fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRequest {
    pub alpha1: f64,
    pub alpha2: f64,
    pub interior_terms: usize,
    pub boundary_terms: usize,
    #[serde(default)]
    pub known_interior: Option<Vec<f64>>,
    #[serde(default = "default_gap")]
    pub gap_min: f64,
}

fn default_gap() -> f64 {
    DEFAULT_GAP_MIN
}

impl FitRequest {
    pub fn new(alpha1: f64, alpha2: f64, interior_terms: usize, boundary_terms: usize) -> Self {
        Self {
            alpha1,
            alpha2,
            interior_terms,
            boundary_terms,
            known_interior: None,
            gap_min: DEFAULT_GAP_MIN,
        }
    }

    pub fn with_known_interior(mut self, beta: Vec<f64>) -> Self {
        self.known_interior = Some(beta);
        self
    }

    /// Sorted exponents of the fitted terms.
    pub fn exponents(&self) -> Result<Vec<f64>> {
        let s = self.alpha1 + self.alpha2;
        let mut g: Vec<f64> = (0..self.boundary_terms).map(|j| (1.0 + j as f64 - s) / 2.0).collect();
        if self.known_interior.is_none() {
            g.extend((0..self.interior_terms).map(|n| n as f64));
        }
        g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if g.is_empty() {
            return Err(Error::Validation("no terms to fit".into()));
        }
        if g.len() > MAX_TERMS {
            return Err(Error::Validation(format!(
                "at most {MAX_TERMS} terms can be fitted, got {}",
                g.len()
            )));
        }
        for w in g.windows(2) {
            if w[1] - w[0] < self.gap_min {
                return Err(Error::Validation(format!(
                    "exponents {} and {} are closer than {}",
                    w[0], w[1], self.gap_min
                )));
            }
        }
        Ok(g)
    }
}

/// Weighted least-squares fit of the requested model to the samples.
pub fn fit(samples: &HeatContentSamples, req: &FitRequest) -> Result<AsymptoticModel> {
    let exps = req.exponents()?;
    let n = samples.entries.len();
    if n < 2 * exps.len() {
        return Err(Error::InsufficientData(format!(
            "{n} samples for {} coefficients",
            exps.len()
        )));
    }
    let (t0, t1) = (samples.entries[0].t, samples.entries[n - 1].t);
    if t1 / t0 < 100.0 {
        return Err(Error::InsufficientData(
            "samples must span at least two decades in t".into(),
        ));
    }
    let y: Vec<f64> = samples
        .entries
        .iter()
        .map(|s| {
            let known: f64 = req
                .known_interior
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .enumerate()
                .map(|(k, b)| b * s.t.powi(k as i32))
                .sum();
            s.beta - known
        })
        .collect();
    let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-12 * ymax).max(f64::MIN_POSITIVE);
    let w: Vec<f64> = y.iter().map(|v| 1.0 / v.abs().max(floor)).collect();
    let mut a = DMatrix::<f64>::from_fn(n, exps.len(), |i, k| w[i] * samples.entries[i].t.powf(exps[k]));
    let scales: Vec<f64> = (0..exps.len()).map(|k| a.column(k).norm()).collect();
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    for (k, s) in scales.iter().enumerate() {
        a.column_mut(k).scale_mut(1.0 / s);
    }
    let b = DVector::<f64>::from_iterator(n, y.iter().zip(&w).map(|(v, wi)| v * wi));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Validation(e.to_string()))?;
    let r = &a * &x - &b;
    let fit_residual = (r.norm_squared() / n as f64).sqrt();
    let coefficients = x.iter().zip(&scales).map(|(v, s)| v / s).collect();
    Ok(AsymptoticModel {
        exponents: exps,
        coefficients,
        fit_residual,
        condition_estimate: condition,
    })
}

/// Root-mean-square relative misfit of a model on samples.
pub fn fit_residual(model: &AsymptoticModel, samples: &HeatContentSamples) -> f64 {
    let n = samples.entries.len().max(1) as f64;
    let ss: f64 = samples
        .entries
        .iter()
        .map(|s| {
            let d = (s.beta - model.eval(s.t)) / s.beta.abs().max(f64::MIN_POSITIVE);
            d * d
        })
        .sum();
    (ss / n).sqrt()
}

/// Log-log slope of |β| against t over samples with t in [lo, hi].
pub fn exponent_probe(samples: &HeatContentSamples, window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = samples
        .entries
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1 && s.beta != 0.0)
        .map(|s| (s.t.ln(), s.beta.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable samples in the probe window",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        return Err(Error::InsufficientData("probe window holds a single time".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> HeatContentSamples {
        let ts = geometric_grid(1e-6, 1e-2, 40).unwrap();
        let bs: Vec<f64> = ts.iter().map(|t| f(*t)).collect();
        HeatContentSamples::from_values("synthetic", &ts, &bs).unwrap()
    }

    #[test]
    fn exact_model_is_recovered() {
        let s = synthetic(|t| 2.0 * t.powf(0.15) + 3.0 * t);
        // exponents 0.15 (j = 0 with α₁ + α₂ = 0.7) and 1 (n = 1), plus n = 0
        let m = fit(&s, &FitRequest::new(0.3, 0.4, 2, 1)).unwrap();
        assert_eq!(m.exponents.len(), 3);
        assert!(m.coefficient(0.0).unwrap().abs() < 1e-12);
        assert!((m.coefficient(0.15).unwrap() - 2.0).abs() < 1e-12);
        assert!((m.coefficient(1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(m.fit_residual < 1e-12);
    }

    #[test]
    fn known_interior_is_subtracted() {
        let s = synthetic(|t| 1.5 - 0.7 * t + 2.0 * t.powf(0.15) - t.powf(0.65));
        let req = FitRequest::new(0.3, 0.4, 2, 2).with_known_interior(vec![1.5, -0.7]);
        let m = fit(&s, &req).unwrap();
        assert_eq!(m.exponents.len(), 2);
        assert!((m.coefficient(0.15).unwrap() - 2.0).abs() < 1e-12);
        assert!((m.coefficient(0.65).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn close_exponents_rejected() {
        // boundary j = 1 exponent 0.99 collides with interior t^1
        let r = FitRequest::new(0.01, 0.01, 2, 2).exponents();
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn insufficient_data() {
        let ts = geometric_grid(1e-3, 1e-2, 10).unwrap();
        let s = HeatContentSamples::from_values("x", &ts, &vec![1.0; 10]).unwrap();
        assert!(matches!(
            fit(&s, &FitRequest::new(0.3, 0.4, 1, 1)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn probe_pure_power() {
        let s = synthetic(|t| 5.0 * t.powf(0.35));
        assert!((exponent_probe(&s, (1e-6, 1e-2)).unwrap() - 0.35).abs() < 1e-10);
    }

    #[test]
    fn unsorted_samples_rejected() {
        assert!(HeatContentSamples::from_values("x", &[2.0, 1.0], &[1.0, 1.0]).is_err());
    }
}
