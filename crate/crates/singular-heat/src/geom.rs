//! Boundary geometry at a point, modified Taylor jets, and assembly of the
//! boundary integrands β_j.

use crate::coeff::{build_table, relative_residual, BoundaryConditionKind, CoefficientTable, ExponentPair};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Local invariants and jets at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPointData {
    pub phi: [Complex64; 3],
    pub rho: [Complex64; 3],
    #[serde(rename = "Laa")]
    pub laa: f64,
    #[serde(rename = "LabLab")]
    pub lab_lab: f64,
    #[serde(rename = "LaaLbb")]
    pub laa_lbb: f64,
    #[serde(rename = "Ricmm")]
    pub ricmm: f64,
    pub tau: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "SR")]
    pub sr: f64,
    pub grad_pair: Complex64,
    pub weight: f64,
}

impl BoundaryPointData {
    /// Flat half-space data: only the jets and the Robin function are set.
    pub fn flat(phi: [f64; 3], rho: [f64; 3], sr: f64) -> Self {
        let c = |v: [f64; 3]| v.map(|x| Complex64::new(x, 0.0));
        Self {
            phi: c(phi),
            rho: c(rho),
            laa: 0.0,
            lab_lab: 0.0,
            laa_lbb: 0.0,
            ricmm: 0.0,
            tau: 0.0,
            e: 0.0,
            sr,
            grad_pair: Complex64::new(0.0, 0.0),
            weight: 1.0,
        }
    }
}

/// Warped product [0, π] × T^{m-1} with metric dr² + Σ e^{2f_a(r)} dθ_a².
/// Only the values f_a'(0) and f_a''(0) enter; f_a(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedProfile {
    pub fprime: Vec<f64>,
    pub fsecond: Vec<f64>,
    #[serde(default)]
    pub sr0: f64,
}

impl WarpedProfile {
    pub fn dim(&self) -> usize {
        self.fprime.len() + 1
    }

    fn validate(&self) -> Result<()> {
        if self.fprime.is_empty() || self.fprime.len() != self.fsecond.len() {
            return Err(Error::Validation(
                "fprime and fsecond must be non-empty and of equal length".into(),
            ));
        }
        if self.fprime.iter().chain(&self.fsecond).any(|v| !v.is_finite()) || !self.sr0.is_finite() {
            return Err(Error::Validation("warping data must be finite".into()));
        }
        Ok(())
    }

    fn sum_f(&self, r: Complex64) -> Complex64 {
        self.fprime
            .iter()
            .zip(&self.fsecond)
            .map(|(a, b)| *a * r + 0.5 * *b * r * r)
            .sum()
    }
}

/// Which covariant derivative a jet is taken with: the temperature side uses
/// ∂_r + ω, the specific-heat side the dual ∂_r - ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetSide {
    Temperature,
    Dual,
}

const CONTOUR_NODES: usize = 64;

/// Taylor coefficients g_0..g_order of a real-analytic `g` at r = 0, by the
/// trapezoid rule on the circle |z| = radius.
fn endpoint_taylor(g: &dyn Fn(Complex64) -> Complex64, radius: f64, order: usize) -> Result<Vec<f64>> {
    let n = CONTOUR_NODES;
    let vals: Vec<Complex64> = (0..n)
        .map(|j| g(Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64)))
        .collect();
    if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::DegenerateInput("smooth factor not finite on the contour".into()));
    }
    Ok((0..=order)
        .map(|k| {
            let s: Complex64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                .sum();
            s.re / n as f64 / radius.powi(k as i32)
        })
        .collect())
}

/// Jets φ^ℓ = (1/ℓ!)(∇_r)^ℓ (r^α φ)|_{r=0}, ℓ = 0..=order.
///
/// `smooth_factor` is r^α φ, real-analytic near r = 0 and evaluated on a
/// circle of radius min(length/2, 1/2) around it; the normal connection
/// coefficient is ω(r) = omega.0 + omega.1·r.
pub fn modified_taylor_jets(
    smooth_factor: &dyn Fn(Complex64) -> Complex64,
    omega: (f64, f64),
    order: usize,
    side: JetSide,
    length: f64,
) -> Result<Vec<f64>> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::DegenerateInput(format!(
            "jet stencil needs length > 0, got {length}"
        )));
    }
    if order > 4 {
        return Err(Error::Validation("jets are supported up to order 4".into()));
    }
    let sigma = match side {
        JetSide::Temperature => 1.0,
        JetSide::Dual => -1.0,
    };
    let depth = order + 1;
    let mut u = endpoint_taylor(smooth_factor, (0.5 * length).min(0.5), order + depth)?;
    let mut jets = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for l in 0..=order {
        if l > 0 {
            fact *= l as f64;
        }
        jets.push(u[0] / fact);
        // ∇u in Taylor coefficients: (k+1)u_{k+1} + σ(ω0 u_k + ω1 u_{k-1})
        let mut next = vec![0.0; u.len().saturating_sub(1)];
        for (k, nk) in next.iter_mut().enumerate() {
            let prev = if k > 0 { u[k - 1] } else { 0.0 };
            *nk = (k as f64 + 1.0) * u[k + 1] + sigma * (omega.0 * u[k] + omega.1 * prev);
        }
        u = next;
    }
    Ok(jets)
}

/// Invariants and jets of the warped product at r = 0, for φ_M = r^{-α₁}·1 and
/// ρ_M = r^{-α₂}e^{-Σf_a}.
pub fn warped_invariants(w: &WarpedProfile) -> Result<BoundaryPointData> {
    w.validate()?;
    let f1: f64 = w.fprime.iter().sum();
    let f2: f64 = w.fsecond.iter().sum();
    let sq: f64 = w.fprime.iter().map(|v| v * v).sum();
    let omega = (-0.5 * f1, -0.5 * f2);
    let phi = modified_taylor_jets(&|_| Complex64::new(1.0, 0.0), omega, 2, JetSide::Temperature, PI)?;
    let rho = modified_taylor_jets(&|r| (-w.sum_f(r)).exp(), omega, 2, JetSide::Dual, PI)?;
    let c = |v: Vec<f64>| [v[0], v[1], v[2]].map(|x| Complex64::new(x, 0.0));
    Ok(BoundaryPointData {
        phi: c(phi),
        rho: c(rho),
        laa: -f1,
        lab_lab: sq,
        laa_lbb: f1 * f1,
        ricmm: -(f2 + sq),
        tau: 0.0,
        e: 0.5 * f2 + 0.25 * f1 * f1,
        sr: w.sr0 + 0.5 * f1,
        grad_pair: Complex64::new(0.0, 0.0),
        weight: (2.0 * PI).powi(w.dim() as i32 - 1),
    })
}

/// Weighted j-th boundary integrand, j ∈ {0, 1, 2}.
pub fn boundary_beta(t: &CoefficientTable, d: &BoundaryPointData, j: usize) -> Result<Complex64> {
    let e = &t.eps;
    let robin = t.bc == BoundaryConditionKind::Robin;
    let (p, q) = (&d.phi, &d.rho);
    let pq = p[0] * q[0];
    let v = match j {
        0 => e[0] * pq,
        1 => {
            let mut v = e[1] * p[1] * q[0] + e[2] * d.laa * pq + e[3] * p[0] * q[1];
            if robin {
                v += e[15] * d.sr * pq;
            }
            v
        }
        2 => {
            let mut v = e[4] * p[2] * q[0]
                + e[5] * d.laa * p[1] * q[0]
                + e[6] * d.e * pq
                + e[7] * p[0] * q[2]
                + e[8] * d.laa * p[0] * q[1]
                + e[9] * d.ricmm * pq
                + e[10] * d.laa_lbb * pq
                + e[11] * d.lab_lab * pq
                + e[12] * d.grad_pair
                + e[13] * d.tau * pq
                + e[14] * p[1] * q[1];
            if robin {
                v += e[16] * d.sr * d.sr * pq
                    + e[17] * d.sr * p[1] * q[0]
                    + e[18] * d.sr * p[0] * q[1]
                    + e[19] * d.sr * d.laa * pq;
            }
            v
        }
        _ => {
            return Err(Error::Validation(format!(
                "boundary order j = {j} not supported (0..=2)"
            )))
        }
    };
    Ok(v * d.weight)
}

/// Applies the dilation x → c·x to the data: jets, second fundamental form,
/// curvature, Robin function and gradient pairing pick up their natural
/// weights.
pub fn rescale(t: &CoefficientTable, d: &BoundaryPointData, c: f64) -> BoundaryPointData {
    let a1 = t.alphas.alpha1;
    let a2 = t.alphas.alpha2;
    let cc = Complex64::new(c, 0.0);
    let mut out = d.clone();
    for l in 0..3 {
        out.phi[l] = d.phi[l] * cc.powc(a1 - l as f64);
        out.rho[l] = d.rho[l] * cc.powc(a2 - l as f64);
    }
    out.laa = d.laa / c;
    out.lab_lab = d.lab_lab / (c * c);
    out.laa_lbb = d.laa_lbb / (c * c);
    out.ricmm = d.ricmm / (c * c);
    out.tau = d.tau / (c * c);
    out.e = d.e / (c * c);
    out.sr = d.sr / c;
    out.grad_pair = d.grad_pair * cc.powc(a1 + a2 - 2.0);
    out
}

/// Relative deviation of β_j(rescaled data) from c^{α₁+α₂-j} β_j(data).
pub fn scaling_check(t: &CoefficientTable, d: &BoundaryPointData, c: f64, j: usize) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Validation("scale factor must be positive".into()));
    }
    let base = boundary_beta(t, d, j)?;
    let scaled = boundary_beta(t, &rescale(t, d, c), j)?;
    let want = base * Complex64::new(c, 0.0).powc(t.alphas.sum() - j as f64);
    Ok(crate::coeff::relative_residual(scaled, want))
}

/// Index-shift consistency for data with φ⁰ = 0 on flat geometry: level j
/// at (α₁, α₂) against level j-1 at (α₁-1, α₂) with jets φ̃^ℓ = φ^{ℓ+1}.
/// Returns the relative residual.
pub fn index_shift_residual(
    bc: BoundaryConditionKind,
    alphas: &ExponentPair,
    d: &BoundaryPointData,
    j: usize,
) -> Result<f64> {
    if !(1..=2).contains(&j) {
        return Err(Error::Validation(format!("index shift needs j in 1..=2, got {j}")));
    }
    if d.phi[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateInput("index shift needs φ⁰ = 0".into()));
    }
    let flat = BoundaryPointData {
        phi: d.phi,
        rho: d.rho,
        e: d.e,
        sr: d.sr,
        weight: d.weight,
        ..BoundaryPointData::flat([0.0; 3], [0.0; 3], 0.0)
    };
    let lhs = boundary_beta(&build_table(bc, alphas)?, &flat, j)?;
    let shifted = BoundaryPointData {
        phi: [d.phi[1], d.phi[2], Complex64::new(0.0, 0.0)],
        ..flat
    };
    let rhs = boundary_beta(&build_table(bc, &alphas.shifted(-1.0, 0.0))?, &shifted, j - 1)?;
    Ok(relative_residual(lhs, rhs))
}
