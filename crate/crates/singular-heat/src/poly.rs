//! Dense real polynomials in a local variable.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    /// c[k] multiplies u^k.
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        let mut p = Self { c };
        p.trim();
        p
    }

    pub fn constant(v: f64) -> Self {
        Self::new(vec![v])
    }

    fn trim(&mut self) {
        while self.c.len() > 1 && *self.c.last().unwrap() == 0.0 {
            self.c.pop();
        }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, v| acc * u + v)
    }

    pub fn eval_complex(&self, u: Complex64) -> Complex64 {
        self.c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * u + v)
    }

    pub fn deriv(&self) -> Self {
        if self.c.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(self.c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect())
    }

    /// m-th derivative evaluated at u.
    pub fn eval_deriv(&self, u: f64, m: usize) -> f64 {
        let mut acc = 0.0;
        for k in (m..self.c.len()).rev() {
            let mut f = 1.0;
            for i in 0..m {
                f *= (k - i) as f64;
            }
            acc = acc * u + f * self.c[k];
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.c.iter().map(|v| v * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![0.0; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Q(u) = P(u + d).
    pub fn shift(&self, d: f64) -> Self {
        let mut out = self.c.clone();
        let n = out.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                out[k] += d * out[k + 1];
            }
        }
        Self::new(out)
    }

    /// Q(u) = P(-u).
    pub fn reflect(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .map(|(k, v)| if k % 2 == 1 { -v } else { *v })
                .collect(),
        )
    }
}
