//! One-parameter isospectral deformation of an unbroken partner pair.
//!
//! With `ψ₀` the zero-energy ground state of `V₋` and `I₀(x) = ∫ψ₀²` taken
//! from the left edge of the grid, `φ = d/dx ln(I₀ + λ) = ψ₀²/(I₀ + λ)` solves
//! `φ² + 2Wφ + φ′ = 0`. Then `W̃ = W + φ` leaves `V₊` unchanged while
//!
//! `Ṽ₋ = V₋ − 4ψ₀ψ₀′/(I₀ + λ) + 2ψ₀⁴/(I₀ + λ)²`
//!
//! has the spectrum of `V₋`, ground state included. `I₀ ∈ [0, 1]`, so the
//! family is regular for `λ > 0` and `λ < −1`.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{refine_richardson, RefinedSpectrum, SolverOptions};
use crate::error::{Error, Result};
use crate::numgrid::{self, Grid, SampledFn};
use crate::potentials::{
    ground_state_normalizability, partner_potentials, zero_mode, Superpotential,
};

/// Smallest `|I₀ + λ|` accepted anywhere on the grid.
pub const SINGULAR_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    lambda: f64,
}

impl DeformationParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 || lambda < -1.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "deformation parameter must satisfy lambda > 0 or lambda < -1 (got {lambda})"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Lower bound on `|I₀ + λ|` implied by `I₀ ∈ [0, 1]`.
    pub fn clearance(&self) -> f64 {
        self.lambda.abs().min((self.lambda + 1.0).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundStateRoute {
    /// `normalize(exp(−∫W))`.
    Analytic,
    /// Lowest eigenpair of `V₋` (Richardson-extrapolated).
    Numeric,
    /// Analytic, after checking it against the numeric state.
    Both,
}

/// Largest L² distance tolerated between the two routes.
pub const ROUTE_AGREEMENT: f64 = 1e-4;

/// Unit-norm, nodeless ground state of `V₋`. Fails with a phase error when
/// `exp(−∫W)` is not normalizable (broken supersymmetry).
pub fn ground_state(
    w: &Superpotential,
    grid: &Grid,
    route: GroundStateRoute,
    opts: &SolverOptions,
) -> Result<SampledFn<f64>> {
    let norm = ground_state_normalizability(w, grid)?;
    if !norm.normalizable {
        return Err(Error::Phase(format!(
            "exp(-∫W) for {w} is not normalizable (norm {:.6e} on the grid, {:.6e} extended); supersymmetry is broken",
            norm.norm_on_grid, norm.norm_extended
        )));
    }
    let analytic = || numgrid::normalize(&zero_mode(w, grid)?);
    let numeric = || -> Result<SampledFn<f64>> {
        let r = refine_richardson(|g| Ok(partner_potentials(w, g)?.v_minus), grid, 1, opts)?;
        let mut s = r.extrapolated(opts.node_eps_rel)?;
        Ok(s.eigenpairs.remove(0).wavefunction)
    };
    match route {
        GroundStateRoute::Analytic => analytic(),
        GroundStateRoute::Numeric => numeric(),
        GroundStateRoute::Both => {
            let a = analytic()?;
            let n = numeric()?;
            let d = numgrid::l2_distance(&a, &n)?;
            if d > ROUTE_AGREEMENT {
                return Err(Error::Phase(format!(
                    "zero mode of {w} differs from the lowest state of V- by {d:.3e} in L2"
                )));
            }
            Ok(a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyDiagnostics {
    pub bernoulli_residual: f64,
    pub strictness_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedFamily {
    pub params: DeformationParams,
    pub psi0: SampledFn<f64>,
    pub i0: SampledFn<f64>,
    pub phi: SampledFn<f64>,
    pub w: SampledFn<f64>,
    /// Exact `W′`, used for `W̃′ = W′ + φ′`.
    pub w_prime: SampledFn<f64>,
    pub w_tilde: SampledFn<f64>,
    pub v_minus: SampledFn<f64>,
    pub v_plus: SampledFn<f64>,
    pub v_minus_tilde: SampledFn<f64>,
    pub diagnostics: FamilyDiagnostics,
}

impl DeformedFamily {
    /// `Ṽ₊ = W̃² + W̃′`, which should reproduce `V₊`.
    pub fn v_plus_tilde(&self) -> SampledFn<f64> {
        let dphi = numgrid::derivative4(&self.phi);
        let v = (0..self.w.len())
            .map(|i| {
                let wt = self.w_tilde.values()[i];
                wt * wt + self.w_prime.values()[i] + dphi.values()[i]
            })
            .collect();
        SampledFn::new(*self.w.grid(), v).expect("same grid")
    }

    /// Closed-form ground state of `Ṽ₋`, `ψ₀/(I₀ + λ)` normalized.
    pub fn ground_state_tilde(&self) -> Result<SampledFn<f64>> {
        let lambda = self.params.lambda;
        numgrid::normalize(&self.psi0.zip_with(&self.i0, |p, i| p / (i + lambda))?)
    }
}

/// Deformed family built on the analytic ground state.
pub fn build_family(
    w: &Superpotential,
    grid: &Grid,
    params: DeformationParams,
) -> Result<DeformedFamily> {
    let psi0 = ground_state(
        w,
        grid,
        GroundStateRoute::Analytic,
        &SolverOptions::default(),
    )?;
    family_from_ground_state(w, psi0, params)
}

/// Deformed family for a given unit-norm ground state, so that sweeps over
/// `λ` share one `ψ₀`.
pub fn family_from_ground_state(
    w: &Superpotential,
    psi0: SampledFn<f64>,
    params: DeformationParams,
) -> Result<DeformedFamily> {
    let grid = *psi0.grid();
    let pp = partner_potentials(w, &grid)?;
    let lambda = params.lambda;
    let density = psi0.map(|p| p * p);
    let i0 = numgrid::cumulative_integral_corrected(&density, grid.x_min())?;
    let (worst_i, worst) = i0
        .values()
        .iter()
        .map(|i| (i + lambda).abs())
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        );
    if worst < SINGULAR_THRESHOLD {
        return Err(Error::SingularFamily(format!(
            "I0 + lambda = {worst:.3e} at x = {} for lambda = {lambda}",
            grid.x(worst_i)
        )));
    }
    let dpsi0 = numgrid::derivative4(&psi0);
    let n = grid.n_points();
    let (p, dp, iv) = (psi0.values(), dpsi0.values(), i0.values());
    let phi: Vec<f64> = (0..n).map(|i| p[i] * p[i] / (iv[i] + lambda)).collect();
    let w_tilde: Vec<f64> = (0..n).map(|i| pp.w.values()[i] + phi[i]).collect();
    let v_minus_tilde: Vec<f64> = (0..n)
        .map(|i| {
            let d = iv[i] + lambda;
            pp.v_minus.values()[i] - 4.0 * p[i] * dp[i] / d + 2.0 * p[i].powi(4) / (d * d)
        })
        .collect();
    let mut family = DeformedFamily {
        params,
        psi0,
        i0,
        phi: SampledFn::new(grid, phi)?,
        w: pp.w,
        w_prime: pp.w_prime,
        w_tilde: SampledFn::new(grid, w_tilde)?,
        v_minus: pp.v_minus,
        v_plus: pp.v_plus,
        v_minus_tilde: SampledFn::new(grid, v_minus_tilde)?,
        diagnostics: FamilyDiagnostics {
            bernoulli_residual: 0.0,
            strictness_residual: 0.0,
        },
    };
    family.diagnostics = FamilyDiagnostics {
        bernoulli_residual: bernoulli_residual(&family, &family.w)?,
        strictness_residual: strictness_check(&family, &family.v_plus)?,
    };
    Ok(family)
}

fn interior_max(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values
        .enumerate()
        .filter(|(i, _)| *i > 0 && *i + 1 < n)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

/// `max |φ² + 2Wφ + φ′|` over the interior of the grid.
pub fn bernoulli_residual(family: &DeformedFamily, w: &SampledFn<f64>) -> Result<f64> {
    let phi = &family.phi;
    let dphi = numgrid::derivative4(phi);
    let r = phi
        .zip_with(w, |f, w| f * f + 2.0 * w * f)?
        .zip_with(&dphi, |a, b| a + b)?;
    Ok(interior_max(r.values().iter().copied(), r.len()))
}

/// `max |W̃² + W̃′ − V₊|` over the interior of the grid.
pub fn strictness_check(family: &DeformedFamily, v_plus: &SampledFn<f64>) -> Result<f64> {
    let r = family.v_plus_tilde().zip_with(v_plus, |a, b| a - b)?;
    Ok(interior_max(r.values().iter().copied(), r.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsospectralityReport {
    pub lambda: f64,
    pub energies: Vec<f64>,
    pub energies_tilde: Vec<f64>,
    pub max_level_deviation: f64,
    pub nodes: Vec<usize>,
    pub nodes_tilde: Vec<usize>,
    pub node_counts_equal: bool,
    /// L² distance between the lowest state of `Ṽ₋` and `ψ₀/(I₀ + λ)`.
    pub ground_state_distance: f64,
}

/// Solves `k` levels of `V₋` and `Ṽ₋` (both Richardson-extrapolated, the
/// family rebuilt on the refined grid) and compares them level by level.
pub fn isospectrality_check(
    w: &Superpotential,
    grid: &Grid,
    params: DeformationParams,
    k: usize,
    opts: &SolverOptions,
) -> Result<IsospectralityReport> {
    let plain = refine_richardson(|g| Ok(partner_potentials(w, g)?.v_minus), grid, k, opts)?;
    let family = build_family(w, grid, params)?;
    let deformed = refine_richardson(
        |g| {
            if g == grid {
                Ok(family.v_minus_tilde.clone())
            } else {
                Ok(build_family(w, g, params)?.v_minus_tilde)
            }
        },
        grid,
        k,
        opts,
    )?;
    compare_spectra(&plain, &deformed, &family, opts)
}

fn compare_spectra(
    plain: &RefinedSpectrum,
    deformed: &RefinedSpectrum,
    family: &DeformedFamily,
    opts: &SolverOptions,
) -> Result<IsospectralityReport> {
    let a = plain.extrapolated(opts.node_eps_rel)?;
    let b = deformed.extrapolated(opts.node_eps_rel)?;
    let nodes: Vec<usize> = a.eigenpairs.iter().map(|p| p.node_count).collect();
    let nodes_tilde: Vec<usize> = b.eigenpairs.iter().map(|p| p.node_count).collect();
    let max_level_deviation = plain
        .energies
        .iter()
        .zip(&deformed.energies)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let expected = family.ground_state_tilde()?;
    let ground_state_distance = numgrid::l2_distance(&b.eigenpairs[0].wavefunction, &expected)?;
    Ok(IsospectralityReport {
        lambda: family.params.lambda,
        energies: plain.energies.clone(),
        energies_tilde: deformed.energies.clone(),
        max_level_deviation,
        node_counts_equal: nodes == nodes_tilde,
        nodes,
        nodes_tilde,
        ground_state_distance,
    })
}
