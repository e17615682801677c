use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<f64>) -> Self {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0] == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// `P(s·x)`.
    pub fn scale_argument(&self, s: f64) -> Self {
        let mut f = 1.0;
        Self::new(
            self.coefficients
                .iter()
                .map(|c| {
                    let v = c * f;
                    f *= s;
                    v
                })
                .collect(),
        )
    }

    fn mul_linear(&self, a: f64, b: f64) -> Self {
        // (a + b x) · P
        let mut out = vec![0.0; self.coefficients.len() + 1];
        for (k, c) in self.coefficients.iter().enumerate() {
            out[k] += a * c;
            out[k + 1] += b * c;
        }
        Self::new(out)
    }

    fn axpy(&self, alpha: f64, other: &Self) -> Self {
        // self + alpha · other
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new(
            (0..n)
                .map(|k| {
                    self.coefficients.get(k).copied().unwrap_or(0.0)
                        + alpha * other.coefficients.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    fn scale(&self, s: f64) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolynomialKind {
    /// Physicists' Hermite `Hₙ`.
    Hermite,
    /// Generalised Laguerre `Lₙ^α`.
    Laguerre { alpha: f64 },
}

pub fn classical_polynomial(kind: PolynomialKind, n: i64) -> Result<Polynomial> {
    if n < 0 {
        return Err(Error::Config(format!(
            "polynomial degree must be >= 0 (got {n})"
        )));
    }
    let n = n as usize;
    match kind {
        PolynomialKind::Hermite => {
            // H_{k+1} = 2x H_k − 2k H_{k−1}
            let mut prev = Polynomial::new(vec![1.0]);
            if n == 0 {
                return Ok(prev);
            }
            let mut cur = Polynomial::new(vec![0.0, 2.0]);
            for k in 1..n {
                let next = cur.mul_linear(0.0, 2.0).axpy(-2.0 * k as f64, &prev);
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
        PolynomialKind::Laguerre { alpha } => {
            // (k+1) L_{k+1} = (2k + 1 + α − x) L_k − (k + α) L_{k−1}
            let mut prev = Polynomial::new(vec![1.0]);
            if n == 0 {
                return Ok(prev);
            }
            let mut cur = Polynomial::new(vec![1.0 + alpha, -1.0]);
            for k in 1..n {
                let kf = k as f64;
                let next = cur
                    .mul_linear(2.0 * kf + 1.0 + alpha, -1.0)
                    .axpy(-(kf + alpha), &prev)
                    .scale(1.0 / (kf + 1.0));
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}
