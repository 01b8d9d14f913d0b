//! Exact heat content on one-dimensional model problems: the half-line by
//! image-kernel quadrature, the interval [0, π] and the circle by spectral sums.

use crate::coeff::BoundaryConditionKind;
use crate::error::{Error, Result};
use crate::profile::{Anchor, Profile, SingularProfile};
use crate::quad::{Estimate, TanhSinh};
use crate::specfun::gamma;
use gauss_quad::GaussLaguerre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Largest number of eigenmodes a spectral sum may use.
pub const TRUNCATION_CAP: usize = 20_000;
/// Target for the spectral tail bound relative to the partial sum.
pub const TAIL_TOL: f64 = 1e-13;

fn gauss_pdf(s: f64, t: f64) -> f64 {
    (-s * s / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Dirichlet (-) or Neumann (+) image kernel on the half-line.
pub fn halfline_kernel(x1: f64, x2: f64, t: f64, bc: BoundaryConditionKind) -> f64 {
    let sign = match bc {
        BoundaryConditionKind::Dirichlet => -1.0,
        BoundaryConditionKind::Robin => 1.0,
    };
    gauss_pdf(x1 - x2, t) + sign * gauss_pdf(x1 + x2, t)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("time must be positive and finite, got {t}")))
    }
}

/// ∫∫ K(x, y, t) φ(x) ρ(y) dx dy on the half-line, with `Robin` meaning the
/// Neumann kernel (c = 0). Both profiles must be anchored at 0.
pub fn halfline_heat_content(
    phi: &SingularProfile,
    rho: &SingularProfile,
    bc: BoundaryConditionKind,
    t: f64,
) -> Result<Estimate<f64>> {
    check_t(t)?;
    if phi.anchor != Anchor::Left || rho.anchor != Anchor::Left {
        return Err(Error::Validation("half-line profiles must be anchored at 0".into()));
    }
    let sign = match bc {
        BoundaryConditionKind::Dirichlet => -1.0,
        BoundaryConditionKind::Robin => 1.0,
    };
    let r_phi = phi.smooth.support_end();
    let r_rho = rho.smooth.support_end();
    let w = 24.0 * t.sqrt();
    // the inner value is a local average of φ, so its rounding floor is set by
    // the profile scale rather than by the (possibly vanishing) value itself
    let inner_q = TanhSinh {
        abs_tol: 1e-15 * phi.amplitude.abs(),
        ..TanhSinh::with_tol(1e-13)
    };
    let outer_q = TanhSinh::with_tol(1e-12);
    let phi_breaks = phi.smooth.breakpoints();
    let mut inner_err = 0.0f64;
    let mut inner_fail = None;
    let mut inner = |y: f64| -> f64 {
        let lo = (y - w).max(0.0);
        let hi = (y + w).min(r_phi);
        let mut total = 0.0;
        if hi > lo {
            let mut breaks = phi_breaks.clone();
            breaks.push(y);
            let f = |x: f64, da: f64, _: f64| {
                let r = if lo == 0.0 { da } else { x };
                gauss_pdf(x - y, t) * phi.deriv_r(r, 0)
            };
            match inner_q.integrate_split(lo, hi, &breaks, f) {
                Ok(e) => {
                    total += e.value;
                    inner_err += e.error;
                }
                Err(e) => inner_fail = Some(e),
            }
        }
        let img_hi = (w - y).min(r_phi);
        if img_hi > 0.0 {
            let f = |x: f64, da: f64, _: f64| gauss_pdf(x + y, t) * phi.deriv_r(da.min(x), 0);
            match inner_q.integrate_split(0.0, img_hi, &phi_breaks, f) {
                Ok(e) => {
                    total += sign * e.value;
                    inner_err += e.error;
                }
                Err(e) => inner_fail = Some(e),
            }
        }
        total
    };
    let mut breaks: Vec<f64> = rho.smooth.breakpoints();
    breaks.push(w);
    for b in &phi_breaks {
        breaks.extend([*b - w, *b, *b + w]);
    }
    let outer = outer_q.integrate_split(0.0, r_rho, &breaks, |y, da, _| {
        let r = da.min(y);
        let v = rho.deriv_r(r, 0);
        if v == 0.0 {
            0.0
        } else {
            v * inner(y)
        }
    });
    if let Some(e) = inner_fail {
        return Err(e);
    }
    let outer = outer?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_err * 1e-3,
        evals: outer.evals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
/// Spectral resolution of D = -∂ₓ² + c² = A*A on [0, π], with A = ∂ₓ + c.
pub enum SpectralResolution {
    Dirichlet {
        c: f64,
    },
    /// Boundary condition A*u = (-∂ₓ + c)u = 0 at both ends, i.e. the Robin
    /// function is -c at 0 and +c at π.
    Robin {
        c: f64,
    },
}

/// Dirichlet or Robin resolution of -∂ₓ² + c² on [0, π].
pub fn interval_spectrum(kind: BoundaryConditionKind, c: f64) -> SpectralResolution {
    match kind {
        BoundaryConditionKind::Dirichlet => SpectralResolution::Dirichlet { c },
        BoundaryConditionKind::Robin => SpectralResolution::Robin { c },
    }
}

impl SpectralResolution {
    pub fn c(&self) -> f64 {
        match self {
            Self::Dirichlet { c } | Self::Robin { c } => *c,
        }
    }

    pub fn kind(&self) -> BoundaryConditionKind {
        match self {
            Self::Dirichlet { .. } => BoundaryConditionKind::Dirichlet,
            Self::Robin { .. } => BoundaryConditionKind::Robin,
        }
    }

    /// First mode index: Robin carries the zero mode e^{cx}.
    pub fn first_index(&self) -> usize {
        match self {
            Self::Dirichlet { .. } => 1,
            Self::Robin { .. } => 0,
        }
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        match self {
            Self::Robin { .. } if n == 0 => 0.0,
            _ => (n * n) as f64 + self.c() * self.c(),
        }
    }

    pub fn eigenfunction(&self, n: usize, x: f64) -> f64 {
        let k = (2.0 / PI).sqrt();
        match self {
            Self::Dirichlet { .. } => k * (n as f64 * x).sin(),
            Self::Robin { c } => {
                if n == 0 {
                    zero_mode(*c, x)
                } else {
                    let nf = n as f64;
                    k * (nf * (nf * x).cos() + c * (nf * x).sin()) / (nf * nf + c * c).sqrt()
                }
            }
        }
    }
}

/// Normalised e^{cx} on [0, π].
fn zero_mode(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        1.0 / PI.sqrt()
    } else if c > 0.0 {
        (2.0 * c / -(-2.0 * c * PI).exp_m1()).sqrt() * (c * (x - PI)).exp()
    } else {
        (2.0 * c / (2.0 * c * PI).exp_m1()).sqrt() * (c * x).exp()
    }
}

fn laguerre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLaguerre::new(48, 0.0)
            .expect("valid Laguerre rule")
            .into_node_weight_pairs()
    })
}

/// Below this value of n·p the steepest-descent endpoint integral is replaced
/// by direct quadrature.
const CONTOUR_MIN: f64 = 30.0;

/// ∫_a^b r^{-α} P(r - a) e^{inr} dr for one polynomial piece.
fn piece_fourier(alpha: f64, a: f64, b: f64, p: &crate::poly::Poly, n: f64) -> Result<(Complex64, f64)> {
    let use_contour = (a == 0.0 || n * a >= CONTOUR_MIN) && n * b >= CONTOUR_MIN;
    if !use_contour {
        let q = TanhSinh::with_tol(1e-14);
        let e = q.integrate(a, b, |x, da, _| {
            let r = if a == 0.0 { da } else { x };
            Complex64::from_polar(r.powf(-alpha) * p.eval(r - a), n * r)
        })?;
        return Ok((e.value, e.error));
    }
    let i = Complex64::new(0.0, 1.0);
    let endpoint = |pt: f64| -> Complex64 {
        if pt == 0.0 {
            // i∫_0^∞ (iy)^{-α} P(iy) e^{-ny} dy, termwise
            p.c.iter()
                .enumerate()
                .map(|(m, pm)| {
                    let s = m as f64 + 1.0 - alpha;
                    let g = gamma(Complex64::new(s, 0.0)).map(|g| g.re).unwrap_or(f64::NAN);
                    *pm * Complex64::from_polar(g * n.powf(-s), 0.5 * PI * s)
                })
                .sum()
        } else {
            let sum: Complex64 = laguerre()
                .iter()
                .map(|(z, w)| {
                    let r = Complex64::new(pt, z / n);
                    *w * (-alpha * r.ln()).exp() * p.eval_complex(r - a)
                })
                .sum();
            i / n * Complex64::from_polar(1.0, n * pt) * sum
        }
    };
    Ok((endpoint(a) - endpoint(b), 0.0))
}

/// ∫_0^π φ(x) e^{inx} dx for one component, with an error estimate.
fn component_fourier(p: &SingularProfile, n: usize) -> Result<(Complex64, f64)> {
    let nf = n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for pc in &p.smooth.pieces {
        let (v, e) = piece_fourier(p.alpha, pc.start, pc.end, &pc.poly, nf)?;
        acc += v;
        err += e;
    }
    acc *= p.amplitude;
    err *= p.amplitude.abs();
    if let Anchor::Right = p.anchor {
        acc = acc.conj();
        if n % 2 == 1 {
            acc = -acc;
        }
    }
    Ok((acc, err))
}

/// ∫ φ(x) g(x) dx over [0, L] for a smooth weight g, by direct quadrature.
fn component_moment(p: &SingularProfile, g: &dyn Fn(f64) -> f64) -> Result<Estimate<f64>> {
    let q = TanhSinh::with_tol(1e-14);
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    for pc in &p.smooth.pieces {
        let e = q.integrate(pc.start, pc.end, |r, da, _| {
            let rr = if pc.start == 0.0 { da } else { r };
            let x = match p.anchor {
                Anchor::Left => rr,
                Anchor::Right => p.length - rr,
            };
            rr.powf(-p.alpha) * pc.poly.eval(rr - pc.start) * g(x)
        })?;
        total.value += e.value;
        total.error += e.error;
        total.evals += e.evals;
    }
    total.value *= p.amplitude;
    total.error *= p.amplitude.abs();
    Ok(total)
}

/// Upper bound on ∫ |φ| over [0, L] for one component: per piece,
/// max |P| (by the triangle inequality) times the exact ∫ r^{-α}.
fn component_l1(p: &SingularProfile) -> f64 {
    let e = 1.0 - p.alpha;
    p.smooth
        .pieces
        .iter()
        .map(|pc| {
            let w = pc.end - pc.start;
            let pmax: f64 = pc
                .poly
                .c
                .iter()
                .enumerate()
                .map(|(k, ck)| ck.abs() * w.powi(k as i32))
                .sum();
            pmax * (pc.end.powf(e) - pc.start.powf(e)) / e
        })
        .sum::<f64>()
        * p.amplitude.abs()
}

/// Generalised Fourier coefficients γ_n = ⟨φ, ψ_n⟩ of a profile.
#[derive(Debug, Clone)]
pub struct SpectralCoefficients {
    pub spec: SpectralResolution,
    /// Index n holds γ_n (entry 0 is zero for Dirichlet).
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Uniform bound |γ_n| ≤ bound.
    pub bound: f64,
}

fn check_interval(phi: &Profile) -> Result<()> {
    if (phi.length() - PI).abs() > 1e-12 {
        return Err(Error::Validation("interval profiles must live on [0, π]".into()));
    }
    Ok(())
}

impl SpectralCoefficients {
    pub fn compute(phi: &Profile, spec: SpectralResolution, n_max: usize) -> Result<Self> {
        check_interval(phi)?;
        let mut abs_l1 = 0.0;
        for p in &phi.parts {
            abs_l1 += component_l1(p);
        }
        let bound = (2.0 / PI).sqrt() * abs_l1;
        let c = spec.c();
        let k = (2.0 / PI).sqrt();
        let rows: Vec<Result<(f64, f64)>> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                if n == 0 {
                    return match spec {
                        SpectralResolution::Dirichlet { .. } => Ok((0.0, 0.0)),
                        SpectralResolution::Robin { c } => {
                            let mut v = 0.0;
                            let mut e = 0.0;
                            for p in &phi.parts {
                                let m = component_moment(p, &|x| zero_mode(c, x))?;
                                v += m.value;
                                e += m.error;
                            }
                            Ok((v, e))
                        }
                    };
                }
                let mut acc = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for p in &phi.parts {
                    let (v, e) = component_fourier(p, n)?;
                    acc += v;
                    err += e;
                }
                let nf = n as f64;
                Ok(match spec {
                    SpectralResolution::Dirichlet { .. } => (k * acc.im, k * err),
                    SpectralResolution::Robin { .. } => {
                        let nrm = (nf * nf + c * c).sqrt();
                        (k * (nf * acc.re + c * acc.im) / nrm, k * err)
                    }
                })
            })
            .collect();
        let mut values = Vec::with_capacity(rows.len());
        let mut errors = Vec::with_capacity(rows.len());
        for r in rows {
            let (v, e) = r?;
            values.push(v);
            errors.push(e);
        }
        Ok(Self {
            spec,
            values,
            errors,
            bound,
        })
    }
}

/// Bound on Σ_{k>n} e^{-tk²}.
fn gaussian_tail(t: f64, n: usize) -> f64 {
    let m = (n + 1) as f64;
    (-t * m * m).exp() * (1.0 + 1.0 / (2.0 * t * m))
}

/// Tail level, relative to the coefficient bounds, at which further modes
/// are below rounding.
const ROUNDING_TAIL: f64 = 1e-16;

/// Upper mode count for time t: the tail is below rounding level relative to
/// the coefficient bounds, or the hard cap is reached.
pub fn truncation_index(t: f64) -> Result<usize> {
    check_t(t)?;
    let mut n = (((-ROUNDING_TAIL.ln()) / t).sqrt().floor() as usize)
        .saturating_sub(1)
        .max(4);
    while gaussian_tail(t, n) > ROUNDING_TAIL && n <= TRUNCATION_CAP {
        n += 1;
    }
    Ok(n.min(TRUNCATION_CAP))
}

fn spectral_sum(a: &SpectralCoefficients, b: &SpectralCoefficients, t: f64) -> Result<Estimate<f64>> {
    let spec = a.spec;
    let n_hi = a.values.len() - 1;
    let bb = a.bound * b.bound * (-t * spec.c() * spec.c()).exp();
    // smallest N whose tail bound is below TAIL_TOL times the partial sum
    let mut partial = 0.0;
    let mut chosen = None;
    for k in spec.first_index()..=n_hi {
        partial += (-t * spec.eigenvalue(k)).exp() * a.values[k] * b.values[k];
        if k >= 1 && bb * gaussian_tail(t, k) < TAIL_TOL * partial.abs() {
            chosen = Some(k);
            break;
        }
    }
    let n = match chosen {
        Some(n) => n,
        None if gaussian_tail(t, n_hi) <= ROUNDING_TAIL => n_hi,
        None => {
            let needed = ((-ROUNDING_TAIL.ln()) / t).sqrt().ceil() as usize;
            return Err(Error::Truncation {
                needed,
                cap: TRUNCATION_CAP,
            });
        }
    };
    let mut v = 0.0;
    let mut e = 0.0;
    for k in (spec.first_index()..=n).rev() {
        let w = (-t * spec.eigenvalue(k)).exp();
        v += w * a.values[k] * b.values[k];
        e += w * (a.errors[k] * b.values[k].abs() + b.errors[k] * a.values[k].abs());
    }
    Ok(Estimate {
        value: v,
        error: e + bb * gaussian_tail(t, n),
        evals: n,
    })
}

/// β(φ, ρ, D, B)(t) = Σ e^{-tλ_n} γ_n(φ) γ_n(ρ) on [0, π].
pub fn interval_heat_content(phi: &Profile, rho: &Profile, spec: SpectralResolution, t: f64) -> Result<Estimate<f64>> {
    Ok(interval_heat_content_grid(phi, rho, spec, &[t])?.remove(0))
}

/// As [`interval_heat_content`] on several times, sharing the coefficients.
pub fn interval_heat_content_grid(
    phi: &Profile,
    rho: &Profile,
    spec: SpectralResolution,
    ts: &[f64],
) -> Result<Vec<Estimate<f64>>> {
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    let mut n_max = 0;
    for t in ts {
        n_max = n_max.max(truncation_index(*t)?);
    }
    let a = SpectralCoefficients::compute(phi, spec, n_max)?;
    let b = if phi == rho {
        a.clone()
    } else {
        SpectralCoefficients::compute(rho, spec, n_max)?
    };
    ts.iter().map(|t| spectral_sum(&a, &b, *t)).collect()
}

/// Fourier series a₀ + Σ_k (a_k cos kθ + b_k sin kθ) on the unit circle.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourierSeries {
    /// cos[0] is the constant term.
    pub cos: Vec<f64>,
    /// sin[k] multiplies sin kθ; sin[0] is ignored.
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn constant(v: f64) -> Self {
        Self {
            cos: vec![v],
            sin: Vec::new(),
        }
    }
}

/// Heat content of -∂_θ² on the circle of length 2π.
pub fn circle_heat_content(phi: &FourierSeries, rho: &FourierSeries, t: f64) -> Result<f64> {
    check_t(t)?;
    let get = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
    let n = phi.cos.len().max(phi.sin.len()).max(rho.cos.len()).max(rho.sin.len());
    let mut s = 2.0 * PI * get(&phi.cos, 0) * get(&rho.cos, 0);
    for k in 1..n {
        let w = (-t * (k * k) as f64).exp();
        s += PI * w * (get(&phi.cos, k) * get(&rho.cos, k) + get(&phi.sin, k) * get(&rho.sin, k));
    }
    Ok(s)
}

/// Default difference step for the intertwining residuals.
pub fn default_dt(t: f64) -> f64 {
    (1e-4f64).min(t / 100.0)
}

fn check_intertwine(phi: &Profile, rho: &Profile, t: f64, dt: f64) -> Result<()> {
    check_t(t)?;
    if !(dt > 0.0 && 2.0 * dt < t) {
        return Err(Error::Validation(format!("need 0 < 2 dt < t, got dt = {dt}")));
    }
    for p in phi.parts.iter().chain(&rho.parts) {
        if p.alpha >= -1.0 {
            return Err(Error::Domain(format!(
                "intertwining needs exponents below -1, got {}",
                p.alpha
            )));
        }
    }
    Ok(())
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
}

/// Five-point central difference; needs t > 2 dt.
fn central_difference(phi: &Profile, rho: &Profile, spec: SpectralResolution, t: f64, dt: f64) -> Result<f64> {
    let ts = [t - 2.0 * dt, t - dt, t + dt, t + 2.0 * dt];
    let v = interval_heat_content_grid(phi, rho, spec, &ts)?;
    Ok((v[0].value - 8.0 * v[1].value + 8.0 * v[2].value - v[3].value) / (12.0 * dt))
}

/// |∂ₜβ_R(φ, ρ)(t) + β_D(A*φ, A*ρ)(t)| / |β_D(A*φ, A*ρ)(t)|, with ∂ₜ by a
/// five-point central difference of step dt.
pub fn intertwine_residual(phi: &Profile, rho: &Profile, c: f64, t: f64, dt: f64) -> Result<f64> {
    check_intertwine(phi, rho, t, dt)?;
    let lhs = central_difference(phi, rho, SpectralResolution::Robin { c }, t, dt)?;
    let dual = SpectralResolution::Dirichlet { c };
    let rhs = interval_heat_content(&phi.apply_a_star(c)?, &rho.apply_a_star(c)?, dual, t)?.value;
    Ok(rel(lhs, -rhs))
}

/// The dual identity: ∂ₜβ_D(φ, ρ)(t) against -β_R(Aφ, Aρ)(t).
pub fn intertwine_dual_residual(phi: &Profile, rho: &Profile, c: f64, t: f64, dt: f64) -> Result<f64> {
    check_intertwine(phi, rho, t, dt)?;
    let lhs = central_difference(phi, rho, SpectralResolution::Dirichlet { c }, t, dt)?;
    let dual = SpectralResolution::Robin { c };
    let rhs = interval_heat_content(&phi.apply_a(c)?, &rho.apply_a(c)?, dual, t)?.value;
    Ok(rel(lhs, -rhs))
}
