//! Regularized interior integrals I_Reg and interior heat-content
//! coefficients on an interval [0, L].
//!
//! Inside a collar of width ε at each endpoint the integrand is replaced by
//! its exact local expansion Σ h_k s^{e+k}, integrated term by term; this is
//! the collar scheme with counterterms h_k ε^{e+k+1}/(e+k+1), where the
//! remainder beyond the first K terms is integrable and also summed exactly.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::profile::{Anchor, Piece, Profile, SingularProfile, SmoothFactor};
use crate::quad::TanhSinh;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Distance from a pole of a counterterm denominator treated as singular.
pub const DEFAULT_POLE_DELTA: f64 = 1e-9;

/// Terms kept in the expansion of a component about the far endpoint.
const FAR_TERMS: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarRegularization {
    /// Collar width ε; chosen automatically inside the first polynomial
    /// pieces when absent.
    pub collar_width: Option<f64>,
    /// Number of counterterms K; ⌈σ⌉ + 1 when absent.
    pub subtraction_order: Option<usize>,
    pub pole_delta: f64,
}

impl Default for CollarRegularization {
    fn default() -> Self {
        Self {
            collar_width: None,
            subtraction_order: None,
            pole_delta: DEFAULT_POLE_DELTA,
        }
    }
}

impl CollarRegularization {
    pub fn with_width(width: f64) -> Self {
        Self {
            collar_width: Some(width),
            ..Self::default()
        }
    }
}

/// amplitude · r^exponent · S(r), r the distance to the anchor.
#[derive(Debug, Clone, PartialEq)]
struct PowerTerm {
    exponent: f64,
    anchor: Anchor,
    amplitude: f64,
    smooth: SmoothFactor,
    length: f64,
}

impl From<&SingularProfile> for PowerTerm {
    fn from(p: &SingularProfile) -> Self {
        Self {
            exponent: -p.alpha,
            anchor: p.anchor,
            amplitude: p.amplitude,
            smooth: p.smooth.clone(),
            length: p.length,
        }
    }
}

impl PowerTerm {
    fn eval(&self, x: f64) -> f64 {
        let r = match self.anchor {
            Anchor::Left => x,
            Anchor::Right => self.length - x,
        };
        let s = self.smooth.eval_deriv(r, 0);
        if s == 0.0 {
            0.0
        } else {
            self.amplitude * r.powf(self.exponent) * s
        }
    }

    /// ∂_r (r^e S) = r^{e-1} (e S + r S').
    fn d_r(&self) -> Self {
        let pieces = self
            .smooth
            .pieces
            .iter()
            .map(|pc| Piece {
                start: pc.start,
                end: pc.end,
                poly: pc
                    .poly
                    .scale(self.exponent)
                    .add(&Poly::new(vec![pc.start, 1.0]).mul(&pc.poly.deriv())),
            })
            .collect();
        Self {
            exponent: self.exponent - 1.0,
            smooth: SmoothFactor { pieces },
            ..self.clone()
        }
    }

    fn breakpoints_x(&self) -> Vec<f64> {
        self.smooth
            .breakpoints()
            .into_iter()
            .map(|b| match self.anchor {
                Anchor::Left => b,
                Anchor::Right => self.length - b,
            })
            .collect()
    }

    /// Exact (own endpoint) or truncated binomial (far endpoint) expansion
    /// in the distance s to `endpoint`, valid for s ≤ eps.
    fn expand(&self, endpoint: Anchor, eps: f64) -> Result<Option<Series>> {
        let pieces = &self.smooth.pieces;
        if self.anchor == endpoint {
            let first = &pieces[0];
            if first.end < eps {
                return Err(Error::Validation(format!(
                    "collar width {eps} exceeds the first smooth piece ({})",
                    first.end
                )));
            }
            return Ok(Some(Series {
                exponent: self.exponent,
                coeffs: first.poly.c.iter().map(|c| c * self.amplitude).collect(),
            }));
        }
        let l = self.length;
        let support = self.smooth.support_end();
        if support <= l - eps {
            return Ok(None);
        }
        let last = pieces.last().unwrap();
        if support < l || last.start > l - eps {
            return Err(Error::Validation(format!(
                "collar width {eps} overlaps a smooth-factor transition near the far endpoint"
            )));
        }
        // (l - s)^e = l^e Σ_j binom(e, j) (-s/l)^j
        let mut binom = Vec::with_capacity(FAR_TERMS);
        let mut b = l.powf(self.exponent) * self.amplitude;
        for j in 0..FAR_TERMS {
            binom.push(b);
            b *= -(self.exponent - j as f64) / ((j + 1) as f64 * l);
        }
        let q = last.poly.shift(l - last.start).reflect();
        let coeffs = convolve(&binom, &q.c, FAR_TERMS);
        Ok(Some(Series { exponent: 0.0, coeffs }))
    }
}

fn convolve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n.min(a.len() + b.len() - 1)];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i + j < out.len() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// s^exponent · Σ_k coeffs[k] s^k.
#[derive(Debug, Clone, PartialEq)]
struct Series {
    exponent: f64,
    coeffs: Vec<f64>,
}

impl Series {
    fn mul(&self, o: &Self) -> Self {
        Self {
            exponent: self.exponent + o.exponent,
            coeffs: convolve(&self.coeffs, &o.coeffs, FAR_TERMS),
        }
    }

    /// Leading exponent with a nonzero coefficient.
    fn order(&self) -> Option<f64> {
        self.coeffs
            .iter()
            .position(|c| *c != 0.0)
            .map(|k| self.exponent + k as f64)
    }
}

fn profile_terms(p: &Profile) -> Vec<PowerTerm> {
    p.parts.iter().map(PowerTerm::from).collect()
}

/// D = -∂ₓ² + c², exactly on the power-term representation.
fn apply_d(terms: &[PowerTerm], c: f64) -> Vec<PowerTerm> {
    let mut out = Vec::with_capacity(2 * terms.len());
    for t in terms {
        let mut dd = t.d_r().d_r();
        dd.amplitude = -dd.amplitude;
        out.push(dd);
        if c != 0.0 {
            out.push(PowerTerm {
                amplitude: t.amplitude * c * c,
                ..t.clone()
            });
        }
    }
    out
}

fn default_collar(terms: &[&PowerTerm], l: f64) -> f64 {
    let mut eps = 0.05 * l;
    for t in terms {
        let pieces = &t.smooth.pieces;
        eps = eps.min(0.5 * pieces[0].end);
        let support = t.smooth.support_end();
        if support >= l {
            eps = eps.min(0.5 * (l - pieces.last().unwrap().start));
        } else if support > 0.5 * l {
            eps = eps.min(0.5 * (l - support));
        }
    }
    eps
}

/// Sum over monomials of h ε^{p+1}/(p+1) at one endpoint.
fn collar_sum(u: &[PowerTerm], v: &[PowerTerm], endpoint: Anchor, eps: f64, reg: &CollarRegularization) -> Result<f64> {
    let mut us = Vec::new();
    for t in u {
        us.extend(t.expand(endpoint, eps)?);
    }
    let mut vs = Vec::new();
    for t in v {
        vs.extend(t.expand(endpoint, eps)?);
    }
    let products: Vec<Series> = us.iter().flat_map(|a| vs.iter().map(move |b| a.mul(b))).collect();
    let Some(lead) = products.iter().filter_map(Series::order).reduce(f64::min) else {
        return Ok(0.0);
    };
    let sigma = -lead;
    let k_auto = (sigma.ceil() + 1.0).max(1.0) as usize;
    let k = reg.subtraction_order.unwrap_or(k_auto);
    if (k as f64) <= sigma {
        return Err(Error::Validation(format!(
            "subtraction order {k} leaves a non-integrable remainder for σ = {sigma}"
        )));
    }
    let mut total = 0.0;
    for s in &products {
        for (j, h) in s.coeffs.iter().enumerate() {
            if *h == 0.0 {
                continue;
            }
            let p1 = s.exponent + j as f64 + 1.0;
            if p1.abs() < reg.pole_delta {
                return Err(Error::Pole(Complex64::new(p1, 0.0)));
            }
            total += h * eps.powf(p1) / p1;
        }
    }
    Ok(total)
}

fn i_reg_terms(u: &[PowerTerm], v: &[PowerTerm], reg: &CollarRegularization) -> Result<f64> {
    let all: Vec<&PowerTerm> = u.iter().chain(v).collect();
    let l = all
        .first()
        .map(|t| t.length)
        .ok_or_else(|| Error::Validation("empty profile".into()))?;
    if all.iter().any(|t| (t.length - l).abs() > 1e-12 * l) {
        return Err(Error::Validation("profiles live on different intervals".into()));
    }
    let eps = match reg.collar_width {
        Some(w) if w > 0.0 && w <= 0.25 * l => w,
        Some(w) => return Err(Error::Validation(format!("collar width must lie in (0, L/4], got {w}"))),
        None => default_collar(&all, l),
    };
    let mut breaks: Vec<f64> = all.iter().flat_map(|t| t.breakpoints_x()).collect();
    breaks.retain(|b| b.is_finite());
    let scale: f64 = all
        .iter()
        .map(|t| t.amplitude.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let q = TanhSinh {
        abs_tol: 1e-15 * scale * scale,
        ..TanhSinh::with_tol(1e-13)
    };
    let interior = q.integrate_split(eps, l - eps, &breaks, |x, _, _| {
        let a: f64 = u.iter().map(|t| t.eval(x)).sum();
        if a == 0.0 {
            return 0.0;
        }
        a * v.iter().map(|t| t.eval(x)).sum::<f64>()
    })?;
    let left = collar_sum(u, v, Anchor::Left, eps, reg)?;
    let right = collar_sum(u, v, Anchor::Right, eps, reg)?;
    Ok(interior.value + left + right)
}

/// I_Reg ∫₀^L φ ρ dx.
pub fn i_reg(phi: &Profile, rho: &Profile, reg: &CollarRegularization) -> Result<f64> {
    i_reg_terms(&profile_terms(phi), &profile_terms(rho), reg)
}

/// β_n^M = (-1)^n / n! · I_Reg ∫ (D^n φ) ρ for n = 0..=n_max, with
/// D = -∂ₓ² + c².
pub fn interior_coefficients(
    phi: &Profile,
    rho: &Profile,
    c: f64,
    n_max: usize,
    reg: &CollarRegularization,
) -> Result<Vec<f64>> {
    let v = profile_terms(rho);
    let mut u = profile_terms(phi);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut fact = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            fact *= n as f64;
            u = apply_d(&u, c);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign / fact * i_reg_terms(&u, &v, reg)?);
    }
    Ok(out)
}
