//! Uniform one-dimensional grids and the discrete calculus built on them.
//!
//! Everything downstream (potentials, eigenstates, quantum momentum
//! functions, deformation curves) is stored as a [`SampledFn`] on a
//! [`Grid`]. Units follow the convention ħ = 2m = 1 throughout.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    FullLine,
    HalfLine,
}

/// A uniform grid `x_i = x_min + i h`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    kind: DomainKind,
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(kind: DomainKind, x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::Domain(format!(
                "grid bounds must satisfy x_min < x_max (got {x_min}, {x_max})"
            )));
        }
        if n_points < 3 {
            return Err(Error::Domain(format!(
                "grid needs at least 3 points (got {n_points})"
            )));
        }
        if kind == DomainKind::HalfLine && x_min <= 0.0 {
            return Err(Error::Domain(format!(
                "half-line grid must exclude the origin (x_min = {x_min})"
            )));
        }
        Ok(Self {
            kind,
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn full_line(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(DomainKind::FullLine, x_min, x_max, n_points)
    }

    /// Half-line grid `[ε, x_max]` whose first point sits one spacing away
    /// from the origin, i.e. `ε = h = x_max / n_points`.
    pub fn half_line(x_max: f64, n_points: usize) -> Result<Self> {
        let eps = x_max / n_points as f64;
        Self::new(DomainKind::HalfLine, eps, x_max, n_points)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// True for half-line grids built by [`Grid::half_line`], whose inner
    /// edge sits exactly one spacing from the origin.
    pub fn is_origin_anchored(&self) -> bool {
        self.kind == DomainKind::HalfLine
            && (self.x_min - self.h()).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }

    /// Half the spacing. Every point of `self` is the refined grid's point
    /// `refinement_offset() + 2i`.
    ///
    /// Bounds are kept (`2n - 1` points), except on origin-anchored half-line
    /// grids, where the inner edge moves to the new spacing (`2n` points) so
    /// that the Dirichlet wall converges to the origin along with `h`.
    pub fn refined(&self) -> Self {
        if self.is_origin_anchored() {
            Self {
                x_min: self.x_min / 2.0,
                n_points: 2 * self.n_points,
                ..*self
            }
        } else {
            Self {
                n_points: 2 * self.n_points - 1,
                ..*self
            }
        }
    }

    pub fn refinement_offset(&self) -> usize {
        usize::from(self.is_origin_anchored())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Scalar types a [`SampledFn`] may carry.
pub trait Sample:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + PartialEq
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn<T = f64> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Sample> SampledFn<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Domain(format!(
                "{} samples supplied for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> T) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Point-wise combination of two samples on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

impl SampledFn<f64> {
    /// Value at an arbitrary abscissa by linear interpolation.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        if !self.grid.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.grid.x_min(),
                self.grid.x_max()
            )));
        }
        let h = self.grid.h();
        let t = (x - self.grid.x_min()) / h;
        let i = (t.floor() as usize).min(self.len() - 2);
        let frac = t - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Domain(format!(
            "grid mismatch: [{}, {}; {}] vs [{}, {}; {}]",
            a.x_min(),
            a.x_max(),
            a.n_points(),
            b.x_min(),
            b.x_max(),
            b.n_points()
        )));
    }
    Ok(())
}

/// First derivative: central differences inside, one-sided three-point
/// stencils at the two ends. Second order everywhere.
pub fn derivative<T: Sample>(f: &SampledFn<T>) -> SampledFn<T> {
    let v = &f.values;
    let n = v.len();
    let inv2h = 1.0 / (2.0 * f.grid.h());
    let mut out = vec![T::zero(); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) * inv2h;
    }
    out[0] = (v[1] * 4.0 - v[0] * 3.0 - v[2]) * inv2h;
    out[n - 1] = (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * inv2h;
    SampledFn {
        grid: f.grid,
        values: out,
    }
}

/// Fourth-order first derivative (five-point stencils, shifted near the
/// ends). Falls back to [`derivative`] on grids shorter than five points.
pub fn derivative4<T: Sample>(f: &SampledFn<T>) -> SampledFn<T> {
    let v = &f.values;
    let n = v.len();
    if n < 5 {
        return derivative(f);
    }
    let c = 1.0 / (12.0 * f.grid.h());
    let mut out = vec![T::zero(); n];
    for i in 2..n - 2 {
        out[i] = (v[i - 2] - v[i + 2] + (v[i + 1] - v[i - 1]) * 8.0) * c;
    }
    let fwd0 = |a: &[T]| a[1] * 48.0 - a[0] * 25.0 - a[2] * 36.0 + a[3] * 16.0 - a[4] * 3.0;
    let fwd1 = |a: &[T]| a[2] * 18.0 - a[0] * 3.0 - a[1] * 10.0 - a[3] * 6.0 + a[4];
    out[0] = fwd0(&v[..5]) * c;
    out[1] = fwd1(&v[..5]) * c;
    let tail: Vec<T> = v[n - 5..].iter().rev().copied().collect();
    out[n - 1] = fwd0(&tail) * (-c);
    out[n - 2] = fwd1(&tail) * (-c);
    SampledFn {
        grid: f.grid,
        values: out,
    }
}

/// Second derivative with the compact three-point stencil inside and
/// four-point one-sided stencils at the ends.
pub fn second_derivative(f: &SampledFn<f64>) -> SampledFn<f64> {
    let v = &f.values;
    let n = v.len();
    let inv_h2 = 1.0 / (f.grid.h() * f.grid.h());
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_h2;
    }
    if n >= 4 {
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * inv_h2;
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) * inv_h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    SampledFn {
        grid: f.grid,
        values: out,
    }
}

/// Fourth-order second derivative (five-point central, six-point one-sided
/// at the two outermost points on each side).
pub fn second_derivative4(f: &SampledFn<f64>) -> SampledFn<f64> {
    let v = &f.values;
    let n = v.len();
    if n < 6 {
        return second_derivative(f);
    }
    let c = 1.0 / (12.0 * f.grid.h() * f.grid.h());
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) * c;
    }
    let end0 = |a: &[f64]| {
        45.0 * a[0] - 154.0 * a[1] + 214.0 * a[2] - 156.0 * a[3] + 61.0 * a[4] - 10.0 * a[5]
    };
    let end1 = |a: &[f64]| 10.0 * a[0] - 15.0 * a[1] - 4.0 * a[2] + 14.0 * a[3] - 6.0 * a[4] + a[5];
    out[0] = end0(&v[..6]) * c;
    out[1] = end1(&v[..6]) * c;
    let tail: Vec<f64> = v[n - 6..].iter().rev().copied().collect();
    out[n - 1] = end0(&tail) * c;
    out[n - 2] = end1(&tail) * c;
    SampledFn {
        grid: f.grid,
        values: out,
    }
}

/// Trapezoid-rule integral over the whole grid.
pub fn integrate(f: &SampledFn<f64>) -> f64 {
    let v = &f.values;
    let inner: f64 = v[1..v.len() - 1].iter().sum();
    f.grid.h() * (inner + 0.5 * (v[0] + v[v.len() - 1]))
}

/// `⟨f, g⟩` under the trapezoid rule.
pub fn inner(f: &SampledFn<f64>, g: &SampledFn<f64>) -> Result<f64> {
    Ok(integrate(&f.zip_with(g, |a, b| a * b)?))
}

pub fn l2_norm(f: &SampledFn<f64>) -> f64 {
    integrate(&f.map(|a| a * a)).sqrt()
}

pub fn l2_distance(f: &SampledFn<f64>, g: &SampledFn<f64>) -> Result<f64> {
    Ok(l2_norm(&f.zip_with(g, |a, b| a - b)?))
}

fn running_trapezoid(f: &SampledFn<f64>) -> Vec<f64> {
    let h = f.grid.h();
    let v = &f.values;
    let mut acc = Vec::with_capacity(v.len());
    let mut s = 0.0;
    acc.push(0.0);
    for w in v.windows(2) {
        s += 0.5 * h * (w[0] + w[1]);
        acc.push(s);
    }
    acc
}

fn anchor_shift(grid: &Grid, running: &[f64], anchor: f64) -> Result<Vec<f64>> {
    if !grid.contains(anchor) {
        return Err(Error::Domain(format!(
            "integration anchor {anchor} outside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let tmp = SampledFn {
        grid: *grid,
        values: running.to_vec(),
    };
    let at_anchor = tmp.interpolate(anchor)?;
    Ok(running.iter().map(|s| s - at_anchor).collect())
}

/// Running trapezoid integral `F` with `F(anchor) = 0`.
pub fn cumulative_integral(f: &SampledFn<f64>, anchor: f64) -> Result<SampledFn<f64>> {
    let running = running_trapezoid(f);
    let values = anchor_shift(&f.grid, &running, anchor)?;
    Ok(SampledFn {
        grid: f.grid,
        values,
    })
}

/// Running trapezoid integral with the leading Euler-Maclaurin endpoint
/// correction `-(h²/12)(f'(x) - f'(x_min))`, which lifts the accuracy to
/// fourth order for smooth integrands.
pub fn cumulative_integral_corrected(f: &SampledFn<f64>, anchor: f64) -> Result<SampledFn<f64>> {
    let h = f.grid.h();
    let df = derivative4(f);
    let d0 = df.values[0];
    let running: Vec<f64> = running_trapezoid(f)
        .iter()
        .zip(&df.values)
        .map(|(s, d)| s - h * h / 12.0 * (d - d0))
        .collect();
    let values = anchor_shift(&f.grid, &running, anchor)?;
    Ok(SampledFn {
        grid: f.grid,
        values,
    })
}

/// Scales `f` to unit L² norm; the first sample above `1e-8 · max|f|` is made
/// positive.
pub fn normalize(f: &SampledFn<f64>) -> Result<SampledFn<f64>> {
    let norm = l2_norm(f);
    let peak = f.max_modulus();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalize a function with L2 norm {norm}"
        )));
    }
    let lead = f
        .values
        .iter()
        .find(|v| v.abs() > 1e-8 * peak)
        .copied()
        .unwrap_or(1.0);
    let scale = lead.signum() / norm;
    Ok(f.map(|v| v * scale))
}
