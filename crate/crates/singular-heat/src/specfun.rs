//! Complex log-Gamma, pole-aware Gamma ratios and the Beta function.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Distance to a non-positive integer below which an argument counts as a pole.
pub const POLE_TOL: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// True when `z` lies within `POLE_TOL` of 0, -1, -2, ...
pub fn is_pole(z: Complex64) -> bool {
    if z.re > POLE_TOL {
        return false;
    }
    let n = z.re.round();
    (z - Complex64::new(n, 0.0)).norm() < POLE_TOL
}

fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let w = z - n;
    let s = Complex64::new(
        (PI * w.re).sin() * (PI * w.im).cosh(),
        (PI * w.re).cos() * (PI * w.im).sinh(),
    );
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm + 0.5) * t.ln() - t + x.ln()
}

/// Principal branch of log Γ(z).
///
/// Uses the Lanczos approximation for Re z >= 1/2 and the reflection formula
/// otherwise, with the 2πi correction that keeps the branch cut on the
/// negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole(z));
    }
    if z.re >= 0.5 {
        return Ok(lanczos_log_gamma(z));
    }
    let shift = if z.im == 0.0 {
        0.0
    } else {
        (2.0 * PI).copysign(z.im) * (0.5 * z.re + 0.25).floor()
    };
    let refl = Complex64::new(PI.ln(), shift) - sin_pi(z).ln() - lanczos_log_gamma(1.0 - z);
    Ok(refl)
}

/// Γ(z); errors at poles.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

/// 1/Γ(z), entire; zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    log_gamma(z).map(|l| (-l).exp())
}

/// Π Γ(num_i) / Π Γ(den_j).
///
/// A denominator argument at a pole makes the whole ratio zero; a numerator
/// argument at a pole is an error.
pub fn gamma_ratio(num: &[Complex64], den: &[Complex64]) -> Result<Complex64> {
    if let Some(z) = num.iter().find(|z| is_pole(**z)) {
        return Err(Error::Pole(*z));
    }
    if den.iter().any(|z| is_pole(*z)) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for z in num {
        acc += log_gamma(*z)?;
    }
    for z in den {
        acc -= log_gamma(*z)?;
    }
    let v = acc.exp();
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain(format!("gamma ratio overflow (log {acc})")));
    }
    Ok(v)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn(a: Complex64, b: Complex64) -> Result<Complex64> {
    gamma_ratio(&[a, b], &[a + b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_at_half_is_sqrt_pi() {
        let g = gamma(c(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-15);
        assert_eq!(g.im, 0.0);
    }

    #[test]
    fn factorials() {
        let mut f = 1.0;
        for n in 1..15 {
            let g = gamma(c(n as f64, 0.0)).unwrap();
            assert!((g.re - f).abs() <= 1e-14 * f, "n={n}");
            f *= n as f64;
        }
    }

    #[test]
    fn poles_detected() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(log_gamma(c(-3.0 + 1e-9, 0.0)).is_ok());
    }

    #[test]
    fn denominator_pole_gives_zero() {
        let r = gamma_ratio(&[c(1.5, 0.0)], &[c(-2.0, 0.0)]).unwrap();
        assert_eq!(r, c(0.0, 0.0));
    }

    #[test]
    fn conjugate_symmetry() {
        let z = c(-2.3, 1.7);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn reflection_identity() {
        let z = c(0.3, 0.4);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        let rhs = PI / sin_pi(z);
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn sin_pi_exact_zero_at_integers() {
        assert_eq!(sin_pi(c(3.0, 0.0)).re, 0.0);
    }
}
