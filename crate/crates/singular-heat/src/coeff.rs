//! Base coefficient ε_{D/R}(α₁, α₂) and the universal boundary constants ε^1..ε^19.

use crate::error::{Error, Result};
use crate::specfun::gamma_ratio;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Default exclusion radius around integer values of α₁ + α₂.
pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryConditionKind {
    Dirichlet,
    Robin,
}

impl BoundaryConditionKind {
    fn sign(self) -> f64 {
        match self {
            Self::Dirichlet => -1.0,
            Self::Robin => 1.0,
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Self::Dirichlet => Self::Robin,
            Self::Robin => Self::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

fn dist_to_integer(z: Complex64) -> f64 {
    (z - z.re.round()).norm()
}

impl ExponentPair {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self> {
        Self::with_delta(alpha1, alpha2, DEFAULT_DELTA)
    }

    pub fn real(alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha1, 0.0), Complex64::new(alpha2, 0.0))
    }

    pub fn with_delta(alpha1: Complex64, alpha2: Complex64, delta: f64) -> Result<Self> {
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Admissibility(format!("{name} is not finite")));
            }
            if a.re >= 1.0 {
                return Err(Error::Admissibility(format!("Re {name} = {} >= 1", a.re)));
            }
        }
        let s = alpha1 + alpha2;
        if dist_to_integer(s) <= delta {
            return Err(Error::Admissibility(format!(
                "alpha1 + alpha2 = {s} within {delta:e} of an integer"
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// Unchecked construction, used for shifted pairs inside the identity chain.
    pub(crate) fn raw(alpha1: Complex64, alpha2: Complex64) -> Self {
        Self { alpha1, alpha2 }
    }

    pub fn sum(&self) -> Complex64 {
        self.alpha1 + self.alpha2
    }

    pub fn swapped(&self) -> Self {
        Self::raw(self.alpha2, self.alpha1)
    }

    pub fn shifted(&self, d1: f64, d2: f64) -> Self {
        Self::raw(self.alpha1 + d1, self.alpha2 + d2)
    }
}

/// (1-a₁)^{k₁}(1-a₂)^{k₂} ε(a₁,a₂), k ∈ {0,1}.
///
/// Absorbing the factor into Γ(1-aᵢ) keeps the value finite at aᵢ = 1, which
/// the chain needs for the upward-shifted pairs.
fn weighted_epsilon(bc: BoundaryConditionKind, a1: Complex64, a2: Complex64, k1: u8, k2: u8) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let s = a1 + a2;
    let g1 = one - a1 + k1 as f64;
    let g2 = one - a2 + k2 as f64;
    let pre = Complex64::new(2.0, 0.0).powc(-s) / PI.sqrt();
    let half = (2.0 - s) / 2.0;
    let first = gamma_ratio(&[half, g1, g2], &[2.0 - s])?;
    let second = gamma_ratio(&[half, s - 1.0, g1], &[a2])? * if k2 == 1 { one - a2 } else { one }
        + gamma_ratio(&[half, s - 1.0, g2], &[a1])? * if k1 == 1 { one - a1 } else { one };
    let v = pre * (bc.sign() * first + second);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain(format!("epsilon at ({a1}, {a2}) is not finite")));
    }
    Ok(v)
}

/// ε_{D/R}(α₁, α₂).
pub fn base_epsilon(bc: BoundaryConditionKind, a: &ExponentPair) -> Result<Complex64> {
    weighted_epsilon(bc, a.alpha1, a.alpha2, 0, 0)
}

fn eps_at(bc: BoundaryConditionKind, a: &ExponentPair, d1: f64, d2: f64) -> Result<Complex64> {
    base_epsilon(bc, &a.shifted(d1, d2))
}

fn eps15(a: &ExponentPair) -> Result<Complex64> {
    use BoundaryConditionKind::Dirichlet;
    let s = a.sum();
    // α₂ε_D(α₁, α₂+1) = -(1-(α₂+1)) ε_D(α₁, α₂+1)
    let t2 = -weighted_epsilon(Dirichlet, a.alpha1, a.alpha2 + 1.0, 0, 1)?;
    let t1 = -weighted_epsilon(Dirichlet, a.alpha1 + 1.0, a.alpha2, 1, 0)?;
    Ok(2.0 / (2.0 - s) * (t1 + t2))
}

fn eps16(a: &ExponentPair) -> Result<Complex64> {
    use BoundaryConditionKind::{Dirichlet, Robin};
    let s = a.sum();
    let d = base_epsilon(Dirichlet, a)?;
    let dd = weighted_epsilon(Dirichlet, a.alpha1 + 1.0, a.alpha2 + 1.0, 1, 1)?;
    let r = base_epsilon(Robin, a)?;
    Ok(-2.0 / (3.0 - s) * d + 2.0 / (3.0 - s) * dd + r)
}

fn eps2(bc: BoundaryConditionKind, a: &ExponentPair) -> Result<Complex64> {
    let e1 = eps_at(bc, a, -1.0, 0.0)?;
    let e3 = eps_at(bc, a, 0.0, -1.0)?;
    Ok(match bc {
        BoundaryConditionKind::Dirichlet => -0.5 * (e1 + e3),
        BoundaryConditionKind::Robin => -0.5 * e1 - 0.5 * e3 + 0.5 * eps15(a)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub bc: BoundaryConditionKind,
    pub alphas: ExponentPair,
    /// `eps[0]` is the base coefficient, `eps[ν]` is ε^ν. Entries 15..19 are
    /// zero and unused for Dirichlet tables.
    pub eps: [Complex64; 20],
}

impl CoefficientTable {
    pub fn eps0(&self) -> Complex64 {
        self.eps[0]
    }

    /// ε^ν, or `None` when ν is outside the table for this boundary condition.
    pub fn get(&self, nu: usize) -> Option<Complex64> {
        match (self.bc, nu) {
            (_, 0..=14) => Some(self.eps[nu]),
            (BoundaryConditionKind::Robin, 15..=19) => Some(self.eps[nu]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        match self.bc {
            BoundaryConditionKind::Dirichlet => 15,
            BoundaryConditionKind::Robin => 20,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ordered map `eps0..epsN -> [re, im]`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("bc".into(), serde_json::to_value(self.bc).unwrap());
        m.insert("alpha1".into(), complex_json(self.alphas.alpha1));
        m.insert("alpha2".into(), complex_json(self.alphas.alpha2));
        for nu in 0..self.len() {
            m.insert(format!("eps{nu}"), complex_json(self.eps[nu]));
        }
        serde_json::Value::Object(m)
    }
}

pub fn complex_json(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

/// Fills ε^1..ε^14 (and ε^15..ε^19 for Robin) by the shift/duality identity chain.
pub fn build_table(bc: BoundaryConditionKind, a: &ExponentPair) -> Result<CoefficientTable> {
    use BoundaryConditionKind::Robin;
    let z = Complex64::new(0.0, 0.0);
    let mut e = [z; 20];
    e[0] = base_epsilon(bc, a)?;
    e[1] = eps_at(bc, a, -1.0, 0.0)?;
    e[3] = eps_at(bc, a, 0.0, -1.0)?;
    e[4] = eps_at(bc, a, -2.0, 0.0)?;
    e[7] = eps_at(bc, a, 0.0, -2.0)?;
    e[14] = eps_at(bc, a, -1.0, -1.0)?;
    e[6] = e[0];
    e[12] = -e[0];
    e[13] = z;
    e[2] = eps2(bc, a)?;
    e[5] = eps2(bc, &a.shifted(-1.0, 0.0))?;
    e[8] = eps2(bc, &a.shifted(0.0, -1.0))?;
    e[9] = -0.25 * e[4] + 0.5 * e[6] - 0.25 * e[7];
    e[11] = e[9];
    e[10] = -0.125 * e[4] - 0.5 * e[5] - 0.25 * e[6] - 0.125 * e[7] - 0.5 * e[8] - 0.25 * e[14];
    if bc == Robin {
        e[15] = eps15(a)?;
        e[16] = eps16(a)?;
        e[17] = eps15(&a.shifted(-1.0, 0.0))?;
        e[18] = eps15(&a.shifted(0.0, -1.0))?;
        e[19] = e[16] - 0.5 * e[17] - 0.5 * e[18];
        e[10] += -0.25 * e[16] + 0.25 * e[17] + 0.25 * e[18] + 0.5 * e[19];
    }
    Ok(CoefficientTable { bc, alphas: *a, eps: e })
}

pub fn relative_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Residuals of the three shift relations, in the order
/// (α₁-2 shift, α₂-2 shift, diagonal shift with D/R exchange).
pub fn recursion_check(bc: BoundaryConditionKind, a: &ExponentPair) -> Result<[f64; 3]> {
    let (a1, a2) = (a.alpha1, a.alpha2);
    let s = a.sum();
    let e = base_epsilon(bc, a)?;
    let r1 = relative_residual(eps_at(bc, a, -2.0, 0.0)?, 2.0 * (a1 - 2.0) * (a1 - 1.0) / (3.0 - s) * e);
    let r2 = relative_residual(eps_at(bc, a, 0.0, -2.0)?, 2.0 * (a2 - 2.0) * (a2 - 1.0) / (3.0 - s) * e);
    let r3 = relative_residual(
        eps_at(bc, a, -1.0, -1.0)?,
        -2.0 * (a1 - 1.0) * (a2 - 1.0) / (3.0 - s) * base_epsilon(bc.dual(), a)?,
    );
    Ok([r1, r2, r3])
}

/// Chain values of the Robin table against the simplified closed forms
/// (legacy expressions) for ε^9, ε^10, ε^16 and ε^19.
pub fn closed_form_crosscheck(a: &ExponentPair) -> Result<BTreeMap<&'static str, f64>> {
    use BoundaryConditionKind::Robin;
    let t = build_table(Robin, a)?;
    let (a1, a2) = (a.alpha1, a.alpha2);
    let s = a.sum();
    let r = t.eps0();
    let mut out = BTreeMap::new();
    out.insert(
        "eps9",
        relative_residual(
            t.eps[9],
            -0.5 * (a1 * a1 - 2.0 * a1 + a2 * a2 - 2.0 * a2 + 1.0) / (3.0 - s) * r,
        ),
    );
    out.insert(
        "eps10",
        relative_residual(t.eps[10], (a1 * a1 + a2 * a2 - 1.0) / (4.0 * (3.0 - s)) * r),
    );
    out.insert(
        "eps16",
        relative_residual(t.eps[16], eps_at(Robin, a, -1.0, -1.0)? / ((a1 - 1.0) * (a2 - 1.0))),
    );
    out.insert("eps19", relative_residual(t.eps[19], s / (3.0 - s) * r));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;
    use BoundaryConditionKind::{Dirichlet, Robin};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn admissibility() {
        assert!(ExponentPair::real(1.0, 0.2).is_err());
        assert!(ExponentPair::real(0.5, 0.5).is_err());
        assert!(ExponentPair::real(0.5, 0.5 + 2e-6).is_ok());
        assert!(ExponentPair::real(-0.5, -0.5).is_err());
    }

    #[test]
    fn classical_limit() {
        // α → 0: Dirichlet gives -2/√π per endpoint, Neumann gives 0
        let a = ExponentPair::real(2e-6, 3e-6).unwrap();
        let d = base_epsilon(Dirichlet, &a).unwrap();
        let r = base_epsilon(Robin, &a).unwrap();
        assert!((d.re + 2.0 / PI.sqrt()).abs() < 1e-4);
        assert!(r.norm() < 1e-4);
    }

    #[test]
    fn robin_minus_dirichlet() {
        let a = ExponentPair::real(0.3, 0.4).unwrap();
        let diff = base_epsilon(Robin, &a).unwrap() - base_epsilon(Dirichlet, &a).unwrap();
        let want = 2.0 * 2f64.powf(-0.7) / PI.sqrt()
            * gamma(c(0.65)).unwrap()
            * gamma(c(0.7)).unwrap()
            * gamma(c(0.6)).unwrap()
            / gamma(c(1.3)).unwrap();
        assert!(relative_residual(diff, want) < 1e-13);
    }

    #[test]
    fn fixed_entries() {
        let a = ExponentPair::real(0.3, 0.4).unwrap();
        let t = build_table(Robin, &a).unwrap();
        assert_eq!(t.eps[6], t.eps0());
        assert_eq!(t.eps[12], -t.eps0());
        assert_eq!(t.eps[13], c(0.0));
        assert_eq!(t.eps[9], t.eps[11]);
        assert!(build_table(Dirichlet, &a).unwrap().get(15).is_none());
    }

    #[test]
    fn dirichlet_eps10_matches_direct_form() {
        let a = ExponentPair::new(Complex64::new(0.2, 0.3), Complex64::new(-0.7, 0.1)).unwrap();
        let t = build_table(Dirichlet, &a).unwrap();
        let e = |d1, d2| eps_at(Dirichlet, &a, d1, d2).unwrap();
        let want = 0.125 * e(-2.0, 0.0) + 0.125 * e(0.0, -2.0) + 0.25 * e(-1.0, -1.0) - 0.25 * e(0.0, 0.0);
        assert!(relative_residual(t.eps[10], want) < 1e-13);
    }

    #[test]
    fn upward_shift_at_unit_exponent_is_finite() {
        // α₁ = 0 makes ε_D(α₁+1, α₂) singular; the weighted form stays finite
        let a = ExponentPair::real(0.0, 0.4).unwrap();
        let t = build_table(Robin, &a).unwrap();
        assert!(t.eps[15].re.is_finite());
        let near = build_table(Robin, &ExponentPair::real(1e-7, 0.4).unwrap()).unwrap();
        assert!(relative_residual(t.eps[15], near.eps[15]) < 1e-5);
    }

    #[test]
    fn json_keys() {
        let a = ExponentPair::real(0.3, 0.4).unwrap();
        let j = build_table(Robin, &a).unwrap().to_json();
        assert_eq!(j["eps13"], serde_json::json!([0.0, 0.0]));
        assert!(j.get("eps19").is_some());
        let j = build_table(Dirichlet, &a).unwrap().to_json();
        assert!(j.get("eps15").is_none());
    }
}
