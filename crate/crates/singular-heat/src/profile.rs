//! Singular profiles r^{-α}·S(r) anchored at an endpoint of [0, L].
//!
//! The smooth factor S is piecewise polynomial, so derivatives, the operators
//! A = ∂ₓ + c and A* = -∂ₓ + c, and local expansions at the endpoints are all
//! exact.

use crate::error::{Error, Result};
use crate::poly::Poly;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Left,
    Right,
}

/// Polynomial piece on [start, end], written in the local variable r - start.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub poly: Poly,
}

/// Piecewise-polynomial smooth factor on [0, support_end()], zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFactor {
    pub pieces: Vec<Piece>,
}

impl SmoothFactor {
    pub fn polynomial(p: Poly, extent: f64) -> Self {
        Self {
            pieces: vec![Piece {
                start: 0.0,
                end: extent,
                poly: p,
            }],
        }
    }

    /// 1 on [0, R/2], quintic smoothstep down to 0 on [R/2, R].
    pub fn cutoff(radius: f64) -> Self {
        let h = 0.5 * radius;
        let step = Poly::new(vec![
            1.0,
            0.0,
            0.0,
            -10.0 / h.powi(3),
            15.0 / h.powi(4),
            -6.0 / h.powi(5),
        ]);
        Self {
            pieces: vec![
                Piece {
                    start: 0.0,
                    end: h,
                    poly: Poly::constant(1.0),
                },
                Piece {
                    start: h,
                    end: radius,
                    poly: step,
                },
            ],
        }
    }

    pub fn support_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.end)
    }

    /// Multiplies by a polynomial given in the global variable r.
    pub fn times(&self, p: &Poly) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|pc| Piece {
                    start: pc.start,
                    end: pc.end,
                    poly: pc.poly.mul(&p.shift(pc.start)),
                })
                .collect(),
        }
    }

    fn piece_at(&self, r: f64) -> Option<&Piece> {
        if r < 0.0 || r > self.support_end() {
            return None;
        }
        self.pieces.iter().find(|p| r <= p.end).or(self.pieces.last())
    }

    /// m-th derivative at r.
    pub fn eval_deriv(&self, r: f64, m: usize) -> f64 {
        match self.piece_at(r) {
            Some(p) => p.poly.eval_deriv(r - p.start, m),
            None => 0.0,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.end).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularProfile {
    pub alpha: f64,
    pub anchor: Anchor,
    pub amplitude: f64,
    pub smooth: SmoothFactor,
    pub length: f64,
}

fn falling(a: f64, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, k| acc * (a - k as f64))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl SingularProfile {
    pub fn new(alpha: f64, anchor: Anchor, amplitude: f64, smooth: SmoothFactor, length: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha >= 1.0 {
            return Err(Error::Validation(format!("profile exponent must be < 1, got {alpha}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Validation("profile length must be positive".into()));
        }
        if smooth.pieces.is_empty() || smooth.pieces[0].start != 0.0 {
            return Err(Error::Validation("smooth factor must start at r = 0".into()));
        }
        if smooth.support_end() > length * (1.0 + 1e-14) {
            return Err(Error::Validation("smooth factor extends past the domain".into()));
        }
        if (smooth.eval_deriv(0.0, 0) - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(
                "smooth factor must equal 1 at the singular endpoint".into(),
            ));
        }
        Ok(Self {
            alpha,
            anchor,
            amplitude,
            smooth,
            length,
        })
    }

    /// r^{-α}χ(r) with the quintic cutoff χ of radius `radius`.
    pub fn with_cutoff(alpha: f64, length: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= length) {
            return Err(Error::Validation("cutoff radius must lie in (0, L]".into()));
        }
        Self::new(alpha, Anchor::Left, 1.0, SmoothFactor::cutoff(radius), length)
    }

    /// r^{-α}(1 - r/L)^k on the whole interval.
    pub fn tapered(alpha: f64, length: f64, k: u32) -> Result<Self> {
        let lin = Poly::new(vec![1.0, -1.0 / length]);
        let mut p = Poly::constant(1.0);
        for _ in 0..k {
            p = p.mul(&lin);
        }
        Self::new(alpha, Anchor::Left, 1.0, SmoothFactor::polynomial(p, length), length)
    }

    /// r^{-α} on the whole interval.
    pub fn power(alpha: f64, length: f64) -> Result<Self> {
        Self::new(
            alpha,
            Anchor::Left,
            1.0,
            SmoothFactor::polynomial(Poly::constant(1.0), length),
            length,
        )
    }

    pub fn anchored(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn scaled(mut self, amplitude: f64) -> Self {
        self.amplitude *= amplitude;
        self
    }

    /// Distance to the anchor endpoint, given the distances to 0 and L
    /// (the abscissa itself is not needed).
    pub fn local_r(&self, _x: f64, d0: f64, d_l: f64) -> f64 {
        match self.anchor {
            Anchor::Left => d0,
            Anchor::Right => d_l,
        }
        .max(0.0)
    }

    /// m-th derivative with respect to r at distance r from the anchor.
    pub fn deriv_r(&self, r: f64, m: usize) -> f64 {
        if r <= 0.0 || r > self.smooth.support_end() {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..=m {
            let s = self.smooth.eval_deriv(r, m - i);
            if s != 0.0 {
                acc += binom(m, i) * falling(-self.alpha, i) * r.powf(-self.alpha - i as f64) * s;
            }
        }
        self.amplitude * acc
    }

    /// m-th derivative with respect to x.
    pub fn deriv_x(&self, r: f64, m: usize) -> f64 {
        let v = self.deriv_r(r, m);
        match self.anchor {
            Anchor::Right if m % 2 == 1 => -v,
            _ => v,
        }
    }

    /// (sign·∂_r + c) applied exactly; the exponent rises by one.
    fn lift(&self, sign: f64, c: f64) -> Result<Self> {
        if self.alpha >= 0.0 {
            return Err(Error::Domain(format!(
                "A/A* needs a negative exponent, got {}",
                self.alpha
            )));
        }
        let pieces = self
            .smooth
            .pieces
            .iter()
            .map(|pc| {
                let r = Poly::new(vec![pc.start, 1.0]);
                let poly = pc
                    .poly
                    .scale(-sign * self.alpha)
                    .add(&r.mul(&pc.poly.deriv()).scale(sign))
                    .add(&r.mul(&pc.poly).scale(c));
                Piece {
                    start: pc.start,
                    end: pc.end,
                    poly,
                }
            })
            .collect();
        let smooth = SmoothFactor { pieces };
        let lead = smooth.eval_deriv(0.0, 0);
        // normalise so the smooth factor is 1 at the anchor
        let smooth = SmoothFactor {
            pieces: smooth
                .pieces
                .into_iter()
                .map(|p| Piece {
                    poly: p.poly.scale(1.0 / lead),
                    ..p
                })
                .collect(),
        };
        Ok(Self {
            alpha: self.alpha + 1.0,
            anchor: self.anchor,
            amplitude: self.amplitude * lead,
            smooth,
            length: self.length,
        })
    }

    /// A = ∂ₓ + c.
    pub fn apply_a(&self, c: f64) -> Result<Self> {
        match self.anchor {
            Anchor::Left => self.lift(1.0, c),
            Anchor::Right => self.lift(-1.0, c),
        }
    }

    /// A* = -∂ₓ + c.
    pub fn apply_a_star(&self, c: f64) -> Result<Self> {
        match self.anchor {
            Anchor::Left => self.lift(-1.0, c),
            Anchor::Right => self.lift(1.0, c),
        }
    }

    /// Breakpoints of the smooth factor in the global coordinate x.
    pub fn breakpoints_x(&self) -> Vec<f64> {
        self.smooth
            .breakpoints()
            .into_iter()
            .map(|r| match self.anchor {
                Anchor::Left => r,
                Anchor::Right => self.length - r,
            })
            .collect()
    }
}

/// Finite sum of anchored singular profiles on a common interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub parts: Vec<SingularProfile>,
}

impl From<SingularProfile> for Profile {
    fn from(p: SingularProfile) -> Self {
        Self { parts: vec![p] }
    }
}

impl Profile {
    pub fn new(parts: Vec<SingularProfile>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Validation("profile needs at least one component".into()));
        }
        let l = parts[0].length;
        if parts.iter().any(|p| (p.length - l).abs() > 1e-14 * l) {
            return Err(Error::Validation(
                "profile components live on different intervals".into(),
            ));
        }
        Ok(Self { parts })
    }

    /// The interval [0, π] profile r^{-α}(1 - r/π)^k at 0, plus `right`
    /// times the mirrored profile at π when `right` is non-zero.
    pub fn tapered_pair(alpha: f64, k: u32, right: f64) -> Result<Self> {
        let left = SingularProfile::tapered(alpha, PI, k)?;
        let mut parts = vec![left.clone()];
        if right != 0.0 {
            parts.push(left.anchored(Anchor::Right).scaled(right));
        }
        Self::new(parts)
    }

    pub fn length(&self) -> f64 {
        self.parts[0].length
    }

    /// m-th x-derivative at x, given the distances to 0 and L.
    pub fn deriv_x(&self, x: f64, d0: f64, d_l: f64, m: usize) -> f64 {
        self.parts.iter().map(|p| p.deriv_x(p.local_r(x, d0, d_l), m)).sum()
    }

    pub fn eval(&self, x: f64, d0: f64, d_l: f64) -> f64 {
        self.deriv_x(x, d0, d_l, 0)
    }

    /// (-∂ₓ² + c²)^n φ at x.
    pub fn d_power(&self, x: f64, d0: f64, d_l: f64, n: usize, c: f64) -> f64 {
        (0..=n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                binom(n, k) * sign * c.powi(2 * (n - k) as i32) * self.deriv_x(x, d0, d_l, 2 * k)
            })
            .sum()
    }

    pub fn apply_a(&self, c: f64) -> Result<Self> {
        Self::new(self.parts.iter().map(|p| p.apply_a(c)).collect::<Result<_>>()?)
    }

    pub fn apply_a_star(&self, c: f64) -> Result<Self> {
        Self::new(self.parts.iter().map(|p| p.apply_a_star(c)).collect::<Result<_>>()?)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let l = self.length();
        let mut b: Vec<f64> = self
            .parts
            .iter()
            .flat_map(|p| p.breakpoints_x())
            .filter(|x| *x > 0.0 && *x < l)
            .collect();
        b.sort_by(|a, c| a.partial_cmp(c).unwrap());
        b.dedup_by(|a, c| (*a - *c).abs() < 1e-14);
        b
    }
}
