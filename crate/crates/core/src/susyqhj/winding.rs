//! Contour integrals of the quantum momentum function `q = −W + P′/P`.
//!
//! With `q ≡ ip` and ħ = 1 the exact quantization condition reads
//! `(1/2πi) ∮ q dz = n`, the number of zeros of `P` (moving poles of `q`)
//! enclosed by the contour.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::potentials::Superpotential;

/// Rectangle `[x_left, x_right] × [−y_half, y_half]`, traversed
/// counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectContour {
    pub x_left: f64,
    pub x_right: f64,
    pub y_half: f64,
    pub samples_per_side: usize,
}

impl RectContour {
    pub const DEFAULT_SAMPLES: usize = 512;

    pub fn new(x_left: f64, x_right: f64, y_half: f64, samples_per_side: usize) -> Result<Self> {
        if !(x_left < x_right) || !(y_half > 0.0) || samples_per_side < 64 {
            return Err(Error::Config(format!(
                "invalid contour [{x_left}, {x_right}] x ±{y_half} with {samples_per_side} samples per side"
            )));
        }
        Ok(Self {
            x_left,
            x_right,
            y_half,
            samples_per_side,
        })
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x_left, -self.y_half),
            Complex64::new(self.x_right, -self.y_half),
            Complex64::new(self.x_right, self.y_half),
            Complex64::new(self.x_left, self.y_half),
        ]
    }

    /// Quadrature nodes and weights (`z_j`, `w_j` with `∮f ≈ Σ w_j f(z_j)`).
    ///
    /// Each side is mapped from `t ∈ [0, 1]` through
    /// `g(t) = t − sin(2πt)/2π`, whose derivative vanishes at the corners,
    /// and integrated with the trapezoid rule in `t`; the grading removes the
    /// corner contributions that would otherwise limit the trapezoid rule to
    /// second order.
    pub fn nodes(&self) -> Vec<(Complex64, Complex64)> {
        let c = self.corners();
        let m = self.samples_per_side;
        let dt = 1.0 / (m - 1) as f64;
        let mut out = Vec::with_capacity(4 * m);
        for s in 0..4 {
            let a = c[s];
            let b = c[(s + 1) % 4];
            for j in 0..m {
                let t = j as f64 * dt;
                let g = t - (2.0 * PI * t).sin() / (2.0 * PI);
                let dg = 1.0 - (2.0 * PI * t).cos();
                let trap = if j == 0 || j + 1 == m { 0.5 } else { 1.0 };
                out.push((a + (b - a) * g, (b - a) * (dg * dt * trap)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingResult {
    /// `(1/2πi) ∮ q dz`.
    pub integral: Complex64,
    pub rounded: i64,
}

impl WindingResult {
    pub fn rounding_error(&self) -> f64 {
        (self.integral - Complex64::new(self.rounded as f64, 0.0)).norm()
    }
}

/// `(1/2πi) ∮ (−W(z) + P′(z)/P(z)) dz` over `contour`.
pub fn winding_number(
    w: &Superpotential,
    p: &Polynomial,
    contour: &RectContour,
) -> Result<WindingResult> {
    if !w.analytic_on_rectangle(contour.x_left, contour.x_right) {
        return Err(Error::Config(format!(
            "{w} has a singularity inside the contour [{}, {}]",
            contour.x_left, contour.x_right
        )));
    }
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let dp = p.derivative();
    let nodes = contour.nodes();
    let values: Vec<Complex64> = nodes.iter().map(|(z, _)| p.eval_complex(*z)).collect();
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_abs = values
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if min_abs <= 1e-8 * max_abs {
        return Err(Error::ZeroOnContour { min_abs });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for ((z, weight), pz) in nodes.iter().zip(&values) {
        let q = -w.w_complex(*z)? + dp.eval_complex(*z) / pz;
        sum += q * weight;
    }
    let integral = sum / Complex64::new(0.0, 2.0 * PI);
    Ok(WindingResult {
        integral,
        rounded: integral.re.round() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::susyqhj::polynomial::{classical_polynomial, PolynomialKind};

    fn osc() -> Superpotential {
        Superpotential::Oscillator { omega: 2.0 }
    }

    fn hermite(n: i64) -> Polynomial {
        classical_polynomial(PolynomialKind::Hermite, n).unwrap()
    }

    #[test]
    fn counts_hermite_zeros() {
        let c = RectContour::new(-3.0, 3.0, 1.0, RectContour::DEFAULT_SAMPLES).unwrap();
        let r = winding_number(&osc(), &hermite(3), &c).unwrap();
        assert_eq!(r.rounded, 3);
        assert!(r.rounding_error() <= 1e-6, "{:?}", r.integral);
        let r0 = winding_number(&osc(), &hermite(0), &c).unwrap();
        assert_eq!(r0.rounded, 0);
        assert!(r0.rounding_error() < 1e-12);
    }

    #[test]
    fn partial_enclosure_counts_only_inside_zeros() {
        // H₃ zeros at 0, ±√1.5; the box [0.5, 3] holds one of them
        let c = RectContour::new(0.5, 3.0, 0.5, 256).unwrap();
        assert_eq!(winding_number(&osc(), &hermite(3), &c).unwrap().rounded, 1);
    }

    #[test]
    fn difference_of_adjacent_states_is_one() {
        let c = RectContour::new(-3.5, 3.5, 1.0, RectContour::DEFAULT_SAMPLES).unwrap();
        let q = winding_number(&osc(), &hermite(3), &c).unwrap();
        let k = winding_number(&osc(), &hermite(2), &c).unwrap();
        assert!(((q.integral - k.integral).re - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn deformation_invariance() {
        let a = RectContour::new(-4.0, 4.0, 1.0, RectContour::DEFAULT_SAMPLES).unwrap();
        let b = RectContour { y_half: 2.0, ..a };
        let p = hermite(5);
        let ia = winding_number(&osc(), &p, &a).unwrap().integral;
        let ib = winding_number(&osc(), &p, &b).unwrap().integral;
        assert!((ia - ib).norm() <= 1e-8, "{ia} vs {ib}");
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(RectContour::new(-1.0, 1.0, 1.0, 10).is_err());
        assert!(RectContour::new(1.0, -1.0, 1.0, 100).is_err());
        // H₁ = 2x vanishes at the origin, the midpoint of the left edge
        let through = RectContour::new(0.0, 2.0, 1.0, 129).unwrap();
        assert!(matches!(
            winding_number(&osc(), &hermite(1), &through),
            Err(Error::ZeroOnContour { .. })
        ));
        let radial = Superpotential::UnbrokenRadial1 {
            omega: 2.0,
            l: -2.5,
        };
        let around_origin = RectContour::new(-1.0, 3.0, 1.0, 128).unwrap();
        assert!(matches!(
            winding_number(&radial, &hermite(2), &around_origin),
            Err(Error::Config(_))
        ));
        let away = RectContour::new(0.2, 3.0, 1.0, 256).unwrap();
        let r = winding_number(&radial, &hermite(3), &away).unwrap();
        assert_eq!(r.rounded, 1);
        assert!(r.rounding_error() < 1e-6);
    }
}
