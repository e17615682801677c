//! Superpotential catalog and partner-potential construction
//! `V∓ = W² ∓ W′` (ħ = 2m = 1).

pub mod expr;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numgrid::{self, DomainKind, Grid, SampledFn};

pub use expr::Expr;

/// User-facing description of a superpotential, as found in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuperpotentialSpec {
    Oscillator {
        omega: f64,
    },
    BrokenRadial {
        omega: f64,
        l: f64,
    },
    UnbrokenRadial1 {
        omega: f64,
        l: f64,
    },
    UnbrokenRadial2 {
        omega: f64,
        l: f64,
    },
    Custom {
        expr: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl SuperpotentialSpec {
    pub fn build(&self) -> Result<Superpotential> {
        let s = match self {
            SuperpotentialSpec::Oscillator { omega } => {
                Superpotential::Oscillator { omega: *omega }
            }
            SuperpotentialSpec::BrokenRadial { omega, l } => Superpotential::BrokenRadial {
                omega: *omega,
                l: *l,
            },
            SuperpotentialSpec::UnbrokenRadial1 { omega, l } => Superpotential::UnbrokenRadial1 {
                omega: *omega,
                l: *l,
            },
            SuperpotentialSpec::UnbrokenRadial2 { omega, l } => Superpotential::UnbrokenRadial2 {
                omega: *omega,
                l: *l,
            },
            SuperpotentialSpec::Custom { expr, params } => {
                let w = Expr::parse(expr, params)?;
                let dw = w.derivative();
                Superpotential::Custom(CustomSuperpotential {
                    source: expr.clone(),
                    w,
                    dw,
                })
            }
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomSuperpotential {
    pub source: String,
    pub w: Expr,
    pub dw: Expr,
}

/// Superpotential with closed-form `W` and `W′`.
#[derive(Debug, Clone, PartialEq)]
pub enum Superpotential {
    /// `W = ωx/2` on the full line.
    Oscillator {
        omega: f64,
    },
    /// `W = ωr/2 − (l+1)/r`, `l < −1`.
    BrokenRadial {
        omega: f64,
        l: f64,
    },
    /// `W₁ = ωr/2 + (l+1)/r`.
    UnbrokenRadial1 {
        omega: f64,
        l: f64,
    },
    /// `W₂ = ωr/2 + (l+2)/r`.
    UnbrokenRadial2 {
        omega: f64,
        l: f64,
    },
    Custom(CustomSuperpotential),
}

impl fmt::Display for Superpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Superpotential::Oscillator { omega } => write!(f, "oscillator(omega={omega})"),
            Superpotential::BrokenRadial { omega, l } => {
                write!(f, "broken_radial(omega={omega}, l={l})")
            }
            Superpotential::UnbrokenRadial1 { omega, l } => {
                write!(f, "unbroken_radial_1(omega={omega}, l={l})")
            }
            Superpotential::UnbrokenRadial2 { omega, l } => {
                write!(f, "unbroken_radial_2(omega={omega}, l={l})")
            }
            Superpotential::Custom(c) => write!(f, "custom({})", c.source),
        }
    }
}

impl Superpotential {
    pub fn validate(&self) -> Result<()> {
        let check_omega = |omega: f64| {
            if omega > 0.0 && omega.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "omega must be positive (got {omega})"
                )))
            }
        };
        match self {
            Superpotential::Oscillator { omega } => check_omega(*omega),
            Superpotential::BrokenRadial { omega, l }
            | Superpotential::UnbrokenRadial1 { omega, l }
            | Superpotential::UnbrokenRadial2 { omega, l } => {
                check_omega(*omega)?;
                if !(*l < -1.0) {
                    return Err(Error::Config(format!(
                        "radial superpotentials require l < -1 (got {l})"
                    )));
                }
                Ok(())
            }
            Superpotential::Custom(_) => Ok(()),
        }
    }

    /// Natural domain of the variant. Custom expressions are accepted on
    /// either kind of grid.
    pub fn domain(&self) -> Option<DomainKind> {
        match self {
            Superpotential::Oscillator { .. } => Some(DomainKind::FullLine),
            Superpotential::Custom(_) => None,
            _ => Some(DomainKind::HalfLine),
        }
    }

    pub fn is_radial(&self) -> bool {
        self.domain() == Some(DomainKind::HalfLine)
    }

    pub fn omega(&self) -> Option<f64> {
        match self {
            Superpotential::Oscillator { omega }
            | Superpotential::BrokenRadial { omega, .. }
            | Superpotential::UnbrokenRadial1 { omega, .. }
            | Superpotential::UnbrokenRadial2 { omega, .. } => Some(*omega),
            Superpotential::Custom(_) => None,
        }
    }

    /// Coefficient `c` of the `c/r` term for the radial variants.
    fn pole_coefficient(&self) -> f64 {
        match self {
            Superpotential::BrokenRadial { l, .. } => -(l + 1.0),
            Superpotential::UnbrokenRadial1 { l, .. } => l + 1.0,
            Superpotential::UnbrokenRadial2 { l, .. } => l + 2.0,
            _ => 0.0,
        }
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        let v = match self {
            Superpotential::Oscillator { omega } => 0.5 * omega * x,
            Superpotential::Custom(c) => return c.w.eval(x),
            _ => {
                let omega = self.omega().unwrap_or_default();
                0.5 * omega * x + self.pole_coefficient() / x
            }
        };
        finite(x, v)
    }

    pub fn w_prime(&self, x: f64) -> Result<f64> {
        let v = match self {
            Superpotential::Oscillator { omega } => 0.5 * omega,
            Superpotential::Custom(c) => return c.dw.eval(x),
            _ => {
                let omega = self.omega().unwrap_or_default();
                0.5 * omega - self.pole_coefficient() / (x * x)
            }
        };
        finite(x, v)
    }

    /// `W(z)` continued into the complex plane.
    pub fn w_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Superpotential::Oscillator { omega } => Ok(z * (0.5 * omega)),
            Superpotential::Custom(c) => c.w.eval_complex(z),
            _ => {
                let omega = self.omega().unwrap_or_default();
                Ok(z * (0.5 * omega) + self.pole_coefficient() / z)
            }
        }
    }

    /// Whether `W` is analytic on the closed rectangle
    /// `[x_left, x_right] × [−y_half, y_half]`.
    pub fn analytic_on_rectangle(&self, x_left: f64, x_right: f64) -> bool {
        match self {
            Superpotential::Oscillator { .. } => true,
            Superpotential::Custom(c) => c.w.is_entire(),
            _ => !(x_left <= 0.0 && x_right >= 0.0),
        }
    }

    /// Closed-form antiderivative `∫W`, up to a constant, where one exists.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        match self {
            Superpotential::Oscillator { omega } => Some(0.25 * omega * x * x),
            Superpotential::Custom(_) => None,
            _ => {
                let omega = self.omega()?;
                Some(0.25 * omega * x * x + self.pole_coefficient() * x.ln())
            }
        }
    }
}

fn finite(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            x,
            reason: format!("non-finite superpotential value {v}"),
        })
    }
}

fn check_domain(s: &Superpotential, grid: &Grid) -> Result<()> {
    if s.is_radial() && grid.kind() != DomainKind::HalfLine {
        return Err(Error::Config(format!(
            "{s} is defined on the half line; got a full-line grid"
        )));
    }
    Ok(())
}

/// Samples of `W` and of its exact derivative.
pub fn eval_superpotential(
    s: &Superpotential,
    grid: &Grid,
) -> Result<(SampledFn<f64>, SampledFn<f64>)> {
    check_domain(s, grid)?;
    let w: Vec<f64> = grid.points().map(|x| s.w(x)).collect::<Result<_>>()?;
    let dw: Vec<f64> = grid.points().map(|x| s.w_prime(x)).collect::<Result<_>>()?;
    Ok((SampledFn::new(*grid, w)?, SampledFn::new(*grid, dw)?))
}

/// Partner potentials generated by one superpotential.
#[derive(Debug, Clone, PartialEq)]
pub struct PartnerPair {
    pub v_minus: SampledFn<f64>,
    pub v_plus: SampledFn<f64>,
    pub w: SampledFn<f64>,
    pub w_prime: SampledFn<f64>,
}

pub fn partner_potentials(s: &Superpotential, grid: &Grid) -> Result<PartnerPair> {
    let (w, w_prime) = eval_superpotential(s, grid)?;
    let v_minus = w.zip_with(&w_prime, |a, b| a * a - b)?;
    let v_plus = w.zip_with(&w_prime, |a, b| a * a + b)?;
    Ok(PartnerPair {
        v_minus,
        v_plus,
        w,
        w_prime,
    })
}

/// Radial-oscillator potentials written out in closed form (not via a
/// superpotential):
///
/// * `V1 = ω²r²/4 + l(l+1)/r² − (l+3/2)ω`
/// * `V2 = ω²r²/4 + (l+1)(l+2)/r² − (l+1/2)ω`
/// * `V1Minus = ω²r²/4 + (l+1)(l+2)/r² + (l+1/2)ω`
/// * `V2Minus = ω²r²/4 + (l+2)(l+3)/r² + (l+3/2)ω`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialForm {
    V1,
    V2,
    V1Minus,
    V2Minus,
}

impl RadialForm {
    pub fn eval(self, r: f64, omega: f64, l: f64) -> f64 {
        let (centrifugal, shift) = match self {
            RadialForm::V1 => (l * (l + 1.0), -(l + 1.5) * omega),
            RadialForm::V2 => ((l + 1.0) * (l + 2.0), -(l + 0.5) * omega),
            RadialForm::V1Minus => ((l + 1.0) * (l + 2.0), (l + 0.5) * omega),
            RadialForm::V2Minus => ((l + 2.0) * (l + 3.0), (l + 1.5) * omega),
        };
        0.25 * omega * omega * r * r + centrifugal / (r * r) + shift
    }

    pub fn sample(self, grid: &Grid, omega: f64, l: f64) -> Result<SampledFn<f64>> {
        if grid.kind() != DomainKind::HalfLine {
            return Err(Error::Config(
                "radial potentials require a half-line grid".into(),
            ));
        }
        Ok(SampledFn::from_fn(*grid, |r| self.eval(r, omega, l)))
    }
}

/// Outcome of comparing two sampled functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// `sup |lhs − rhs|`.
    pub max_abs_deviation: f64,
    /// `sup |lhs − rhs| / max(1, |lhs|)`.
    pub max_rel_deviation: f64,
    /// Constant `c` minimising `sup |lhs − rhs − c|`.
    pub fitted_offset: f64,
    /// `sup |lhs − rhs − c|` at the fitted constant.
    pub offset_residual: f64,
}

impl IdentityCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_rel_deviation <= rel_tol
    }

    /// The relation holds after shifting by a constant.
    pub fn holds_up_to_constant(&self, tol: f64) -> bool {
        self.offset_residual <= tol
    }
}

pub fn check_identity(lhs: &SampledFn<f64>, rhs: &SampledFn<f64>) -> Result<IdentityCheck> {
    numgrid::same_grid(lhs.grid(), rhs.grid())?;
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in lhs.values().iter().zip(rhs.values()) {
        let d = a - b;
        max_abs = max_abs.max(d.abs());
        max_rel = max_rel.max(d.abs() / a.abs().max(1.0));
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(IdentityCheck {
        max_abs_deviation: max_abs,
        max_rel_deviation: max_rel,
        fitted_offset: 0.5 * (hi + lo),
        offset_residual: 0.5 * (hi - lo),
    })
}

/// Square-integrability of the zero-energy candidate `exp(−∫W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalizability {
    /// `∫ exp(−2∫W)` on the given grid.
    pub norm_on_grid: f64,
    /// The same integral on the extended grid.
    pub norm_extended: f64,
    /// Half-line only: the candidate decays toward the origin.
    pub regular_at_origin: bool,
    pub normalizable: bool,
}

fn extended_grid(grid: &Grid) -> Result<Grid> {
    match grid.kind() {
        DomainKind::HalfLine => {
            // keep the spacing, move the inner edge twice as close to r = 0
            let x_min = 0.5 * grid.x_min();
            let n = ((grid.x_max() - x_min) / grid.h()).round() as usize + 1;
            Grid::new(DomainKind::HalfLine, x_min, grid.x_max(), n.max(3))
        }
        DomainKind::FullLine => {
            let half = 0.5 * (grid.x_max() - grid.x_min());
            Grid::new(
                DomainKind::FullLine,
                grid.x_min() - half,
                grid.x_max() + half,
                2 * grid.n_points() - 1,
            )
        }
    }
}

fn log_candidate(s: &Superpotential, grid: &Grid, reference: f64) -> Result<Vec<f64>> {
    // log of exp(−∫_reference^x W)
    match s.antiderivative(reference) {
        Some(a_ref) => grid
            .points()
            .map(|x| {
                s.antiderivative(x)
                    .map(|a| -(a - a_ref))
                    .ok_or_else(|| Error::Evaluation {
                        x,
                        reason: "antiderivative unavailable".into(),
                    })
            })
            .collect(),
        None => {
            let (w, _) = eval_superpotential(s, grid)?;
            Ok(numgrid::cumulative_integral(&w, reference)?
                .values()
                .iter()
                .map(|v| -v)
                .collect())
        }
    }
}

/// Samples of `exp(−∫W)`, scaled so that the largest sample is 1. Uses
/// the closed-form antiderivative when there is one, the corrected running
/// integral otherwise.
pub fn zero_mode(s: &Superpotential, grid: &Grid) -> Result<SampledFn<f64>> {
    check_domain(s, grid)?;
    let logs = match s.antiderivative(grid.x_min()) {
        Some(_) => log_candidate(s, grid, grid.x_min())?,
        None => {
            let (w, _) = eval_superpotential(s, grid)?;
            numgrid::cumulative_integral_corrected(&w, grid.x_min())?
                .values()
                .iter()
                .map(|v| -v)
                .collect()
        }
    };
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SampledFn::new(*grid, logs.iter().map(|l| (l - top).exp()).collect())
}

/// Decides whether `exp(−∫W)` is a normalizable (and, on the half line,
/// regular) state by comparing its norm on `grid` with the norm on a grid
/// extended toward the origin (half line) or to twice the width (full line).
pub fn ground_state_normalizability(s: &Superpotential, grid: &Grid) -> Result<Normalizability> {
    check_domain(s, grid)?;
    let ext = extended_grid(grid)?;
    let reference = match grid.kind() {
        DomainKind::HalfLine => grid.x_max(),
        DomainKind::FullLine => 0.5 * (grid.x_min() + grid.x_max()),
    };
    let norm_on = |g: &Grid| -> Result<(f64, Vec<f64>)> {
        let logs = log_candidate(s, g, reference)?;
        let dens = SampledFn::new(*g, logs.iter().map(|l| (2.0 * l).exp()).collect())?;
        Ok((numgrid::integrate(&dens), logs))
    };
    let (base, logs_base) = norm_on(grid)?;
    let (extended, logs_ext) = norm_on(&ext)?;
    let regular_at_origin = match grid.kind() {
        DomainKind::HalfLine => logs_ext[0] < logs_base[0],
        DomainKind::FullLine => true,
    };
    let stable = base.is_finite() && extended.is_finite() && (extended - base).abs() <= 1e-3 * base;
    Ok(Normalizability {
        norm_on_grid: base,
        norm_extended: extended,
        regular_at_origin,
        normalizable: stable && regular_at_origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgrid() -> Grid {
        Grid::half_line(10.0, 2000).unwrap()
    }

    #[test]
    fn catalog_values() {
        let osc = Superpotential::Oscillator { omega: 2.0 };
        assert_eq!(osc.w(3.0).unwrap(), 3.0);
        assert_eq!(osc.w_prime(3.0).unwrap(), 1.0);
        let br = Superpotential::BrokenRadial {
            omega: 2.0,
            l: -2.5,
        };
        assert_eq!(br.w(1.0).unwrap(), 2.5);
        assert_eq!(br.w_prime(1.0).unwrap(), -0.5);
        let custom = SuperpotentialSpec::Custom {
            expr: "exp(-x)".into(),
            params: BTreeMap::new(),
        }
        .build()
        .unwrap();
        assert_eq!(custom.w(0.0).unwrap(), 1.0);
        assert_eq!(custom.w_prime(0.0).unwrap(), -1.0);
    }

    #[test]
    fn validation() {
        assert!(SuperpotentialSpec::BrokenRadial {
            omega: 2.0,
            l: -0.5
        }
        .build()
        .is_err());
        assert!(SuperpotentialSpec::Oscillator { omega: 0.0 }
            .build()
            .is_err());
        assert!(SuperpotentialSpec::UnbrokenRadial1 {
            omega: 2.0,
            l: -2.5
        }
        .build()
        .is_ok());
    }

    #[test]
    fn spec_json_shape() {
        let s: SuperpotentialSpec =
            serde_json::from_str(r#"{"variant": "broken_radial", "omega": 2.0, "l": -2.5}"#)
                .unwrap();
        assert_eq!(
            s,
            SuperpotentialSpec::BrokenRadial {
                omega: 2.0,
                l: -2.5
            }
        );
        let c: SuperpotentialSpec = serde_json::from_str(
            r#"{"variant": "custom", "expr": "omega/2 * x - (l+1)/x", "params": {"omega": 2.0, "l": -2.5}}"#,
        )
        .unwrap();
        let built = c.build().unwrap();
        assert!((built.w(1.0).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn oscillator_partners() {
        let g = Grid::full_line(-5.0, 5.0, 101).unwrap();
        let p = partner_potentials(&Superpotential::Oscillator { omega: 2.0 }, &g).unwrap();
        for (i, x) in g.points().enumerate() {
            assert!((p.v_minus.values()[i] - (x * x - 1.0)).abs() < 1e-12);
            assert!((p.v_plus.values()[i] - (x * x + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_domain_mismatch() {
        let g = Grid::full_line(-5.0, 5.0, 101).unwrap();
        let br = Superpotential::BrokenRadial {
            omega: 2.0,
            l: -2.5,
        };
        assert!(matches!(partner_potentials(&br, &g), Err(Error::Config(_))));
    }

    #[test]
    fn custom_singular_point_is_named() {
        let s = SuperpotentialSpec::Custom {
            expr: "1/x".into(),
            params: BTreeMap::new(),
        }
        .build()
        .unwrap();
        let g = Grid::full_line(-1.0, 1.0, 11).unwrap();
        assert!(matches!(
            eval_superpotential(&s, &g),
            Err(Error::Evaluation { x, .. }) if x.abs() < 1e-15
        ));
    }

    #[test]
    fn broken_partners_match_closed_forms() {
        let br = Superpotential::BrokenRadial {
            omega: 2.0,
            l: -2.5,
        };
        let g = rgrid();
        let p = partner_potentials(&br, &g).unwrap();
        let v1 = RadialForm::V1.sample(&g, 2.0, -2.5).unwrap();
        let v2 = RadialForm::V2.sample(&g, 2.0, -2.5).unwrap();
        assert!(check_identity(&p.v_minus, &v1).unwrap().holds(1e-12));
        assert!(check_identity(&p.v_plus, &v2).unwrap().holds(1e-12));
        // V₊(1) = 6.25 − 0.5 = 5.75
        assert!((RadialForm::V2.eval(1.0, 2.0, -2.5) - 5.75).abs() < 1e-15);
        assert!((br.w(1.0).unwrap().powi(2) + br.w_prime(1.0).unwrap() - 5.75).abs() < 1e-15);
    }

    #[test]
    fn unbroken_radial_minus_partner_matches_closed_form() {
        // oracle: W₁² − W₁′ expanded by hand
        //   = ω²r²/4 + ω(l+1) + (l+1)²/r² − ω/2 + (l+1)/r²
        let (omega, l) = (2.0, -2.5);
        let s = Superpotential::UnbrokenRadial1 { omega, l };
        for r in [0.13, 0.4, 0.77, 1.0, 1.9, 2.5, 3.3, 4.1, 6.0, 8.8] {
            let hand =
                omega * omega * r * r / 4.0 + omega * (l + 1.0) + (l + 1.0).powi(2) / (r * r)
                    - omega / 2.0
                    + (l + 1.0) / (r * r);
            let v = s.w(r).unwrap().powi(2) - s.w_prime(r).unwrap();
            let closed = RadialForm::V1Minus.eval(r, omega, l);
            assert!((v - hand).abs() <= 1e-12 * hand.abs().max(1.0));
            assert!((closed - hand).abs() <= 1e-12 * hand.abs().max(1.0));
        }
    }

    #[test]
    fn identity_checks() {
        let g = rgrid();
        let (omega, l) = (2.0, -2.5);
        let v2 = RadialForm::V2.sample(&g, omega, l).unwrap();
        let v1_shift = RadialForm::V1
            .sample(&g, omega, l + 1.0)
            .unwrap()
            .map(|v| v + 2.0 * omega);
        let c = check_identity(&v2, &v1_shift).unwrap();
        assert!(c.holds(1e-12), "{c:?}");

        let same = check_identity(&v2, &v2).unwrap();
        assert_eq!(same.max_abs_deviation, 0.0);

        // V1(l) against V1⁻(l−1) shifted by the printed −ω(2l−4): off by a constant
        let v1 = RadialForm::V1.sample(&g, omega, l).unwrap();
        let printed = RadialForm::V1Minus
            .sample(&g, omega, l - 1.0)
            .unwrap()
            .map(|v| v - omega * (2.0 * l - 4.0));
        let c = check_identity(&v1, &printed).unwrap();
        assert!(c.holds_up_to_constant(1e-9));
        assert!(c.max_abs_deviation > 1.0);
        // derived constant: V1(l) − V1⁻(l−1) = −ω(2l+1) = 8, printed 18
        assert!(
            (c.fitted_offset - omega * (2.0 * l - 4.0) - (-omega * (2.0 * l + 1.0))).abs() < 1e-9
        );

        let g2 = Grid::half_line(10.0, 1000).unwrap();
        assert!(check_identity(&v1, &RadialForm::V1.sample(&g2, omega, l).unwrap()).is_err());
    }

    #[test]
    fn partner_difference_is_twice_w_prime() {
        let g = rgrid();
        for s in [
            Superpotential::BrokenRadial {
                omega: 2.0,
                l: -2.5,
            },
            Superpotential::UnbrokenRadial1 {
                omega: 1.0,
                l: -3.0,
            },
            Superpotential::UnbrokenRadial2 {
                omega: 2.0,
                l: -4.0,
            },
        ] {
            let p = partner_potentials(&s, &g).unwrap();
            for i in 0..g.n_points() {
                let d = p.v_plus.values()[i] - p.v_minus.values()[i] - 2.0 * p.w_prime.values()[i];
                assert!(d.abs() <= 1e-12 * p.v_plus.values()[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn normalizability_separates_the_phases() {
        let g = rgrid();
        let broken = ground_state_normalizability(
            &Superpotential::BrokenRadial {
                omega: 2.0,
                l: -2.5,
            },
            &g,
        )
        .unwrap();
        assert!(!broken.normalizable);
        assert!(broken.norm_extended > 3.0 * broken.norm_on_grid);

        let unbroken = ground_state_normalizability(
            &Superpotential::UnbrokenRadial1 {
                omega: 2.0,
                l: -2.5,
            },
            &g,
        )
        .unwrap();
        assert!(unbroken.normalizable, "{unbroken:?}");

        let osc = ground_state_normalizability(
            &Superpotential::Oscillator { omega: 2.0 },
            &Grid::full_line(-12.0, 12.0, 801).unwrap(),
        )
        .unwrap();
        assert!(osc.normalizable);

        let wrong_sign = SuperpotentialSpec::Custom {
            expr: "-x".into(),
            params: BTreeMap::new(),
        }
        .build()
        .unwrap();
        let r =
            ground_state_normalizability(&wrong_sign, &Grid::full_line(-6.0, 6.0, 401).unwrap())
                .unwrap();
        assert!(!r.normalizable);
    }
}
