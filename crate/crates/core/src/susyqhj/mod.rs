//! Quantum momentum functions and the relations between partner states.
//!
//! For an eigenfunction `ψ` the QMF is `q = ψ′/ψ`, which obeys the Riccati
//! equation `q² + q′ + E − V = 0`. For a degenerate pair (`ψ` of `V₋`, `χ` of
//! `V₊`) with QMFs `q`, `k` the intertwiners give
//! `k = q + (q′ + W′)/(q + W)` and `(q + W)(−k + W) = E`.
//!
//! `q` has a simple pole at every node of `ψ`, so all residuals are taken
//! over a mask that drops a few samples around each node and wherever `ψ` is
//! too small for the quotient to mean anything.

mod polynomial;
mod winding;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use polynomial::{classical_polynomial, Polynomial, PolynomialKind};
pub use winding::{winding_number, RectContour, WindingResult};

use crate::eigensolve::{count_nodes, Eigenpair, Spectrum};
use crate::error::{Error, Result};
use crate::numgrid::{self, DomainKind, Grid, SampledFn};

/// Samples dropped on each side of a node or pole.
pub const NODE_GUARD: usize = 2;
/// Relative amplitude below which `ψ′/ψ` is not trusted.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;
/// Fraction of a half-line grid's span, measured from the origin, on which
/// the QMF is never trusted. Radial QMFs have a fixed pole at the origin and
/// the discretisation error of `ψ′/ψ` grows like a power of `1/r` there.
pub const ORIGIN_GUARD_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct QmfSample {
    grid: Grid,
    q: Vec<f64>,
    /// `q′`, consistent with `q` at the same sample.
    dq: Vec<f64>,
    mask: Vec<bool>,
}

impl QmfSample {
    /// Wraps given values. Without `dq` the derivative is taken numerically
    /// over each contiguous trusted run; without `mask` every sample is
    /// trusted.
    pub fn from_values(
        grid: Grid,
        q: Vec<f64>,
        dq: Option<Vec<f64>>,
        mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        let n = grid.n_points();
        let mut mask = mask.unwrap_or_else(|| vec![true; n]);
        if q.len() != n || mask.len() != n || dq.as_ref().is_some_and(|d| d.len() != n) {
            return Err(Error::Domain("QMF arrays do not match the grid".into()));
        }
        let dq = match dq {
            Some(d) => d,
            None => run_derivative(&grid, &q, &mut mask),
        };
        Ok(Self { grid, q, dq, mask })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn dq(&self) -> &[f64] {
        &self.dq
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn trusted_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Additionally distrusts samples with `x < x_cut`.
    pub fn exclude_below(mut self, x_cut: f64) -> Self {
        for i in 0..self.mask.len() {
            if self.grid.x(i) < x_cut {
                self.mask[i] = false;
            }
        }
        self
    }
}

/// Derivative of `q` over each maximal run of trusted samples, so that no
/// stencil straddles a pole. Runs too short for a stencil are untrusted.
fn run_derivative(grid: &Grid, q: &[f64], mask: &mut [bool]) -> Vec<f64> {
    let mut dq = vec![0.0; q.len()];
    let mut i = 0;
    while i < q.len() {
        if !mask[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < q.len() && mask[i] {
            i += 1;
        }
        let len = i - start;
        if len < 3 {
            mask[start..i].iter_mut().for_each(|m| *m = false);
            continue;
        }
        let sub = Grid::full_line(grid.x(start), grid.x(i - 1), len)
            .and_then(|g| SampledFn::new(g, q[start..i].to_vec()));
        match sub {
            Ok(f) => dq[start..i].copy_from_slice(numgrid::derivative4(&f).values()),
            Err(_) => mask[start..i].iter_mut().for_each(|m| *m = false),
        }
    }
    dq
}

fn mask_around(mask: &mut [bool], lo: usize, hi: usize, guard: usize) {
    let a = lo.saturating_sub(guard);
    let b = (hi + guard).min(mask.len() - 1);
    mask[a..=b].iter_mut().for_each(|m| *m = false);
}

/// `q = ψ′/ψ`, with `q′ = ψ″/ψ − q²`.
///
/// Both derivatives use fourth-order stencils on `ψ` itself. Taking `q′`
/// from `ψ″` rather than by differencing `q` keeps its pole structure
/// consistent with that of `q`, which matters a few samples from a node.
///
/// The mask drops samples with `|ψ| < 1e−6·max|ψ|` and [`NODE_GUARD`]
/// samples around every sign change, and on half-line grids everything
/// within [`ORIGIN_GUARD_FRACTION`] of the span from the origin. At least half of the samples above the
/// amplitude floor must survive.
pub fn qmf_from_wavefunction(psi: &SampledFn<f64>) -> Result<QmfSample> {
    let grid = *psi.grid();
    let v = psi.values();
    let n = v.len();
    let peak = psi.max_modulus();
    if !(peak > 0.0) {
        return Err(Error::Degenerate("wavefunction is identically zero".into()));
    }
    let d1 = numgrid::derivative4(psi);
    let d2 = numgrid::second_derivative4(psi);
    let floor = AMPLITUDE_FLOOR * peak;
    let mut mask: Vec<bool> = v.iter().map(|p| p.abs() >= floor).collect();
    let above_floor = mask.iter().filter(|m| **m).count();
    if grid.kind() == DomainKind::HalfLine {
        let r_cut = ORIGIN_GUARD_FRACTION * grid.x_max();
        for (i, m) in mask.iter_mut().enumerate() {
            if grid.x(i) < r_cut {
                *m = false;
            }
        }
    }

    let mut last: Option<usize> = None;
    for (i, &p) in v.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if let Some(j) = last {
            if v[j].signum() != p.signum() {
                mask_around(&mut mask, j, i, NODE_GUARD);
            }
        }
        last = Some(i);
    }

    let mut q = vec![0.0; n];
    let mut dq = vec![0.0; n];
    for i in 0..n {
        if v[i] != 0.0 {
            q[i] = d1.values()[i] / v[i];
            dq[i] = d2.values()[i] / v[i] - q[i] * q[i];
        } else {
            mask[i] = false;
        }
    }
    let trusted = mask.iter().filter(|m| **m).count();
    if 2 * trusted < above_floor {
        return Err(Error::Degenerate(format!(
            "only {trusted} of {above_floor} samples above the amplitude floor survive node masking"
        )));
    }
    Ok(QmfSample { grid, q, dq, mask })
}

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Domain("operands live on different grids".into()));
    }
    Ok(())
}

/// `max |q² + q′ + E − V|` over the trusted samples.
pub fn riccati_residual(q: &QmfSample, e: f64, v: &SampledFn<f64>) -> Result<f64> {
    same_grid(&q.grid, v.grid())?;
    let mut worst: Option<f64> = None;
    for i in 0..q.q.len() {
        if q.mask[i] {
            let r = (q.q[i] * q.q[i] + q.dq[i] + e - v.values()[i]).abs();
            worst = Some(worst.map_or(r, |w: f64| w.max(r)));
        }
    }
    worst.ok_or_else(|| Error::Degenerate("QMF mask is empty".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intertwiner {
    /// `d/dx + W`
    A,
    /// `−d/dx + W`
    ADagger,
}

pub fn apply_intertwiner(
    w: &SampledFn<f64>,
    f: &SampledFn<f64>,
    dir: Intertwiner,
) -> Result<SampledFn<f64>> {
    same_grid(w.grid(), f.grid())?;
    let df = numgrid::derivative4(f);
    let sign = match dir {
        Intertwiner::A => 1.0,
        Intertwiner::ADagger => -1.0,
    };
    let values = df
        .values()
        .iter()
        .zip(w.values().iter().zip(f.values()))
        .map(|(d, (w, f))| sign * d + w * f)
        .collect();
    SampledFn::new(*f.grid(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntertwiningCheck {
    pub energy: f64,
    /// `|⟨χ, Aψ⟩| / (‖χ‖ ‖Aψ‖)`
    pub cos_similarity_a: f64,
    /// `|⟨ψ, A†χ⟩| / (‖ψ‖ ‖A†χ‖)`
    pub cos_similarity_adag: f64,
    /// Least-squares `C` in `ψ ≈ C·A†χ`.
    pub c: f64,
    /// Least-squares `D` in `χ ≈ D·Aψ`.
    pub d: f64,
    pub cde: f64,
}

impl IntertwiningCheck {
    pub fn aligned(&self, tol: f64) -> bool {
        self.cos_similarity_a >= 1.0 - tol && self.cos_similarity_adag >= 1.0 - tol
    }

    pub fn cde_error(&self) -> f64 {
        (self.cde - 1.0).abs()
    }
}

/// Checks `χ ∝ Aψ`, `ψ ∝ A†χ` and `C·D·E = 1` for a degenerate pair.
pub fn intertwining_check(
    w: &SampledFn<f64>,
    psi: &Eigenpair,
    chi: &Eigenpair,
    pairing_tol: f64,
) -> Result<IntertwiningCheck> {
    if psi.energy <= pairing_tol {
        return Err(Error::Pairing(format!(
            "intertwining constants are undefined at E = {} (<= {pairing_tol})",
            psi.energy
        )));
    }
    intertwining_from_states(w, &psi.wavefunction, &chi.wavefunction, psi.energy)
}

/// [`intertwining_check`] on bare states with a given energy.
pub fn intertwining_from_states(
    w: &SampledFn<f64>,
    psi: &SampledFn<f64>,
    chi: &SampledFn<f64>,
    energy: f64,
) -> Result<IntertwiningCheck> {
    same_grid(psi.grid(), chi.grid())?;
    let a_psi = apply_intertwiner(w, psi, Intertwiner::A)?;
    let adag_chi = apply_intertwiner(w, chi, Intertwiner::ADagger)?;
    let n_apsi = numgrid::l2_norm(&a_psi);
    let n_adchi = numgrid::l2_norm(&adag_chi);
    if !(n_apsi > 0.0) || !(n_adchi > 0.0) {
        return Err(Error::Degenerate(
            "intertwiner annihilates the state".into(),
        ));
    }
    let chi_apsi = numgrid::inner(chi, &a_psi)?;
    let psi_adchi = numgrid::inner(psi, &adag_chi)?;
    let d = chi_apsi / (n_apsi * n_apsi);
    let c = psi_adchi / (n_adchi * n_adchi);
    Ok(IntertwiningCheck {
        energy,
        cos_similarity_a: chi_apsi.abs() / (numgrid::l2_norm(chi) * n_apsi),
        cos_similarity_adag: psi_adchi.abs() / (numgrid::l2_norm(psi) * n_adchi),
        c,
        d,
        cde: c * d * energy,
    })
}

/// Trusted samples for the partner relations: both QMFs trusted and at
/// least [`NODE_GUARD`] samples away from any sign change of `q + W`.
fn relation_mask(q: &QmfSample, k: &QmfSample, w: &SampledFn<f64>) -> Result<Vec<bool>> {
    same_grid(&q.grid, &k.grid)?;
    same_grid(&q.grid, w.grid())?;
    let mut mask: Vec<bool> = q.mask.iter().zip(&k.mask).map(|(a, b)| *a && *b).collect();
    let s: Vec<f64> = q.q.iter().zip(w.values()).map(|(q, w)| q + w).collect();
    let trusted: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    for pair in trusted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if s[a] == 0.0 || s[a].signum() != s[b].signum() {
            mask_around(&mut mask, a, b, NODE_GUARD);
        }
    }
    if !mask.iter().any(|m| *m) {
        return Err(Error::Degenerate("joint QMF mask is empty".into()));
    }
    Ok(mask)
}

/// `max |k − q − (q′ + W′)/(q + W)|` over the joint mask.
pub fn partner_relation_residual(
    q: &QmfSample,
    k: &QmfSample,
    w: &SampledFn<f64>,
    w_prime: &SampledFn<f64>,
) -> Result<f64> {
    same_grid(&q.grid, w_prime.grid())?;
    let mask = relation_mask(q, k, w)?;
    let (wv, wpv) = (w.values(), w_prime.values());
    Ok((0..mask.len())
        .filter(|&i| mask[i])
        .map(|i| (k.q[i] - q.q[i] - (q.dq[i] + wpv[i]) / (q.q[i] + wv[i])).abs())
        .fold(0.0, f64::max))
}

/// `max |(q + W)(−k + W) − E|` over the joint mask.
pub fn product_identity_residual(
    q: &QmfSample,
    k: &QmfSample,
    w: &SampledFn<f64>,
    e: f64,
) -> Result<f64> {
    let mask = relation_mask(q, k, w)?;
    let wv = w.values();
    Ok((0..mask.len())
        .filter(|&i| mask[i])
        .map(|i| ((q.q[i] + wv[i]) * (wv[i] - k.q[i]) - e).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Unbroken,
    Broken,
}

impl Phase {
    pub fn expected_node_diff(self) -> i64 {
        match self {
            Phase::Unbroken => 1,
            Phase::Broken => 0,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Unbroken => "unbroken",
            Phase::Broken => "broken",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneratePair {
    pub n_minus: usize,
    pub n_plus: usize,
    pub e_minus: f64,
    pub e_plus: f64,
    pub delta_e: f64,
    pub node_minus: i64,
    pub node_plus: i64,
    pub node_diff: i64,
}

impl DegeneratePair {
    pub fn new(psi: &Eigenpair, chi: &Eigenpair) -> Self {
        Self {
            n_minus: psi.index,
            n_plus: chi.index,
            e_minus: psi.energy,
            e_plus: chi.energy,
            delta_e: psi.energy - chi.energy,
            node_minus: psi.node_count as i64,
            node_plus: chi.node_count as i64,
            node_diff: psi.node_count as i64 - chi.node_count as i64,
        }
    }
}

/// Matches levels of `V₋` and `V₊`: `E_n(−) ↔ E_{n−1}(+)` with `E₀(−) = 0`
/// when unbroken, `E_n ↔ E_n` when broken.
pub fn pair_spectra(
    minus: &Spectrum,
    plus: &Spectrum,
    phase: Phase,
    tol: f64,
) -> Result<Vec<DegeneratePair>> {
    let offset = match phase {
        Phase::Unbroken => {
            let e0 = minus
                .eigenpairs
                .first()
                .ok_or_else(|| Error::Pairing("empty V- spectrum".into()))?
                .energy;
            if e0.abs() >= tol {
                return Err(Error::Pairing(format!(
                    "unbroken phase needs a zero-energy ground state, found E0 = {e0:e}"
                )));
            }
            1
        }
        Phase::Broken => 0,
    };
    let mut pairs = Vec::new();
    let mut bad = Vec::new();
    for (psi, chi) in minus.eigenpairs.iter().skip(offset).zip(&plus.eigenpairs) {
        let p = DegeneratePair::new(psi, chi);
        if !(p.delta_e.abs() < tol * p.e_minus.abs().max(1.0)) {
            bad.push(format!(
                "E{}(-) = {} vs E{}(+) = {}",
                p.n_minus, p.e_minus, p.n_plus, p.e_plus
            ));
        }
        pairs.push(p);
    }
    if pairs.is_empty() {
        return Err(Error::Pairing("no levels to pair".into()));
    }
    if !bad.is_empty() {
        return Err(Error::Pairing(format!(
            "levels differ by more than {tol:e}: {}",
            bad.join("; ")
        )));
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GozziReport {
    pub phase: Phase,
    pub pairs: Vec<DegeneratePair>,
    pub expected_node_diff: i64,
    pub verdict: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Node differences of each pair, recounted from the wavefunctions in
/// `minus` and `plus` with relative threshold `eps_rel`.
pub fn gozzi_check(
    pairs: &[DegeneratePair],
    minus: &Spectrum,
    plus: &Spectrum,
    phase: Phase,
    eps_rel: f64,
) -> Result<GozziReport> {
    fn find(s: &Spectrum, n: usize) -> Result<&Eigenpair> {
        s.eigenpairs
            .iter()
            .find(|p| p.index == n)
            .ok_or_else(|| Error::Pairing(format!("level {n} missing from {}", s.potential_id)))
    }
    let expected = phase.expected_node_diff();
    let mut out = Vec::with_capacity(pairs.len());
    for p in pairs {
        let nm = count_nodes(&find(minus, p.n_minus)?.wavefunction, eps_rel)? as i64;
        let np = count_nodes(&find(plus, p.n_plus)?.wavefunction, eps_rel)? as i64;
        out.push(DegeneratePair {
            node_minus: nm,
            node_plus: np,
            node_diff: nm - np,
            ..*p
        });
    }
    let verdict = !out.is_empty() && out.iter().all(|p| p.node_diff == expected);
    Ok(GozziReport {
        phase,
        pairs: out,
        expected_node_diff: expected,
        verdict,
        diagnostics: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{refine_richardson, solve_spectrum, SolverOptions};
    use crate::potentials::{partner_potentials, Superpotential};
    use proptest::prelude::*;

    fn line(n: usize) -> Grid {
        Grid::full_line(-8.0, 8.0, n).unwrap()
    }

    fn trusted_max(q: &QmfSample, f: impl Fn(f64) -> f64) -> f64 {
        (0..q.q().len())
            .filter(|&i| q.mask()[i])
            .map(|i| (q.q()[i] - f(q.grid().x(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_log_derivative() {
        let g = line(1601);
        let psi = SampledFn::from_fn(g, |x| (-x * x / 2.0).exp());
        let q = qmf_from_wavefunction(&psi).unwrap();
        assert!(trusted_max(&q, |x| -x) <= 1e-4);
    }

    #[test]
    fn first_excited_log_derivative() {
        let g = line(1601);
        let psi = SampledFn::from_fn(g, |x| x * (-x * x / 2.0).exp());
        let q = qmf_from_wavefunction(&psi).unwrap();
        assert!(trusted_max(&q, |x| 1.0 / x - x) <= 1e-4);
        let centre = (g.n_points() - 1) / 2;
        for i in centre - 2..=centre + 2 {
            assert!(!q.mask()[i]);
        }
        assert!(q.mask()[centre + 5]);
    }

    #[test]
    fn constant_has_zero_qmf() {
        let psi = SampledFn::from_fn(line(101), |_| 0.7);
        let q = qmf_from_wavefunction(&psi).unwrap();
        assert!(q.mask().iter().all(|m| *m));
        assert!(q.q().iter().all(|v| v.abs() < 1e-12));
        assert!(
            riccati_residual(&q, 0.0, &SampledFn::from_fn(line(101), |_| 0.0)).unwrap() < 1e-12
        );
    }

    #[test]
    fn rejects_zero_and_node_dense_input() {
        let z = SampledFn::from_fn(line(101), |_| 0.0);
        assert!(matches!(
            qmf_from_wavefunction(&z),
            Err(Error::Degenerate(_))
        ));
        let dense = SampledFn::from_fn(line(101), |x| (7.0 * x).sin() + 0.1);
        assert!(matches!(
            qmf_from_wavefunction(&dense),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn analytic_riccati() {
        let g = line(801);
        let q = QmfSample::from_values(g, g.points().map(|x| -x).collect(), None, None).unwrap();
        let v = SampledFn::from_fn(g, |x| x * x);
        assert!(riccati_residual(&q, 1.0, &v).unwrap() <= 1e-6);
    }

    #[test]
    fn numerical_riccati_on_solved_ground_state() {
        let g = Grid::full_line(-12.0, 12.0, 4001).unwrap();
        let build = |g: &Grid| Ok(SampledFn::from_fn(*g, |x| x * x - 1.0));
        let r = refine_richardson(build, &g, 1, &SolverOptions::default()).unwrap();
        let s = r.extrapolated(1e-6).unwrap();
        let q = qmf_from_wavefunction(&s.eigenpairs[0].wavefunction).unwrap();
        let res = riccati_residual(&q, s.eigenpairs[0].energy, &build(&g).unwrap()).unwrap();
        assert!(res <= 1e-3, "{res}");
    }

    #[test]
    fn intertwiner_annihilates_ground_state() {
        let g = line(4001);
        let w = SampledFn::from_fn(g, |x| x);
        let psi0 = numgrid::normalize(&SampledFn::from_fn(g, |x| (-x * x / 2.0).exp())).unwrap();
        let out = apply_intertwiner(&w, &psi0, Intertwiner::A).unwrap();
        assert!(out.max_modulus() <= 1e-4);
        let zero = SampledFn::from_fn(g, |_| 0.0);
        let f = SampledFn::from_fn(g, |x| x.sin());
        let df = apply_intertwiner(&zero, &f, Intertwiner::A).unwrap();
        let cosine = SampledFn::from_fn(g, f64::cos);
        assert!(numgrid::l2_distance(&df, &cosine).unwrap() < 1e-6);
    }

    fn composition_error(width: f64, shift: f64, n: usize) -> f64 {
        // A†A f = −f″ + (W² − W′) f with W = x
        let g = line(n);
        let w = SampledFn::from_fn(g, |x| x);
        let f = SampledFn::from_fn(g, |x| (-(x - shift).powi(2) / width).exp());
        let aa = apply_intertwiner(
            &w,
            &apply_intertwiner(&w, &f, Intertwiner::A).unwrap(),
            Intertwiner::ADagger,
        )
        .unwrap();
        let exact = SampledFn::from_fn(g, |x| {
            let y = x - shift;
            let e = (-y * y / width).exp();
            let f2 = (4.0 * y * y / (width * width) - 2.0 / width) * e;
            -f2 + (x * x - 1.0) * e
        });
        numgrid::l2_distance(&aa, &exact).unwrap()
    }

    #[test]
    fn composition_reproduces_hamiltonian() {
        let coarse = composition_error(1.5, 0.3, 401);
        let fine = composition_error(1.5, 0.3, 801);
        assert!(coarse < 1e-2 && fine < coarse / 8.0, "{coarse} {fine}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn composition_converges_for_random_gaussians(width in 0.5f64..3.0, shift in -2.0f64..2.0) {
            let coarse = composition_error(width, shift, 401);
            let fine = composition_error(width, shift, 801);
            prop_assert!(fine <= coarse / 3.5 + 1e-12);
        }
    }

    fn hermite_state(n: i64, g: Grid) -> SampledFn<f64> {
        let h = classical_polynomial(PolynomialKind::Hermite, n).unwrap();
        numgrid::normalize(&SampledFn::from_fn(g, |x| h.eval(x) * (-x * x / 2.0).exp())).unwrap()
    }

    #[test]
    fn analytic_cde() {
        let g = line(16001);
        let w = SampledFn::from_fn(g, |x| x);
        let c =
            intertwining_from_states(&w, &hermite_state(1, g), &hermite_state(0, g), 2.0).unwrap();
        assert!(c.cde_error() <= 1e-8, "{c:?}");
        assert!(c.aligned(1e-10));
        let bad =
            intertwining_from_states(&w, &hermite_state(1, g), &hermite_state(1, g), 2.0).unwrap();
        assert!(bad.cos_similarity_a < 0.99);
    }

    fn osc_spectra(levels: usize) -> (Spectrum, Spectrum, crate::potentials::PartnerPair) {
        let s = Superpotential::Oscillator { omega: 2.0 };
        let g = Grid::full_line(-12.0, 12.0, 4001).unwrap();
        let opts = SolverOptions::default();
        let pp = partner_potentials(&s, &g).unwrap();
        let m = refine_richardson(
            |g| Ok(partner_potentials(&s, g)?.v_minus),
            &g,
            levels + 1,
            &opts,
        )
        .unwrap()
        .extrapolated(1e-6)
        .unwrap();
        let p = refine_richardson(|g| Ok(partner_potentials(&s, g)?.v_plus), &g, levels, &opts)
            .unwrap()
            .extrapolated(1e-6)
            .unwrap();
        (m, p, pp)
    }

    #[test]
    fn oscillator_pairs_and_relations() {
        let (m, p, pp) = osc_spectra(6);
        let pairs = pair_spectra(&m, &p, Phase::Unbroken, 1e-4).unwrap();
        assert_eq!(pairs.len(), 6);
        let report = gozzi_check(&pairs, &m, &p, Phase::Unbroken, 1e-6).unwrap();
        assert!(report.verdict);
        assert!(report.pairs.iter().all(|p| p.node_diff == 1));
        for pair in &pairs {
            let psi = &m.eigenpairs[pair.n_minus];
            let chi = &p.eigenpairs[pair.n_plus];
            let ic = intertwining_check(&pp.w, psi, chi, 1e-4).unwrap();
            assert!(ic.aligned(1e-6) && ic.cde_error() <= 1e-3, "{ic:?}");
            let q = qmf_from_wavefunction(&psi.wavefunction).unwrap();
            let k = qmf_from_wavefunction(&chi.wavefunction).unwrap();
            assert!(riccati_residual(&q, psi.energy, &pp.v_minus).unwrap() <= 1e-3);
            assert!(riccati_residual(&k, chi.energy, &pp.v_plus).unwrap() <= 1e-3);
            let r23 = partner_relation_residual(&q, &k, &pp.w, &pp.w_prime).unwrap();
            let r19 = product_identity_residual(&q, &k, &pp.w, psi.energy).unwrap();
            assert!(r23 <= 1e-3, "pair {}: partner relation {r23}", pair.n_minus);
            assert!(
                r19 <= 5e-3 * psi.energy.max(1.0),
                "pair {}: product identity {r19}",
                pair.n_minus
            );
        }
        assert!(intertwining_check(&pp.w, &m.eigenpairs[0], &p.eigenpairs[0], 1e-4).is_err());
    }

    #[test]
    fn mismatched_pairing_fails_the_node_criterion() {
        let (m, p, _) = osc_spectra(3);
        let wrong = DegeneratePair::new(&m.eigenpairs[2], &p.eigenpairs[2]);
        let report = gozzi_check(&[wrong], &m, &p, Phase::Unbroken, 1e-6).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.pairs[0].node_diff, 0);
    }

    #[test]
    fn analytic_partner_relations() {
        // ψ₁ ∝ x e^{−x²/2} of V₋ = x² − 1, χ₀ ∝ e^{−x²/2} of V₊ = x² + 1, E = 2
        let g = Grid::full_line(-6.0, 6.0, 12000).unwrap();
        let q = QmfSample::from_values(
            g,
            g.points().map(|x| 1.0 / x - x).collect(),
            Some(g.points().map(|x| -1.0 / (x * x) - 1.0).collect()),
            None,
        )
        .unwrap();
        let k = QmfSample::from_values(
            g,
            g.points().map(|x| -x).collect(),
            Some(vec![-1.0; 12000]),
            None,
        )
        .unwrap();
        let w = SampledFn::from_fn(g, |x| x);
        let wp = SampledFn::from_fn(g, |_| 1.0);
        assert!(partner_relation_residual(&q, &k, &w, &wp).unwrap() <= 1e-10);
        assert!(product_identity_residual(&q, &k, &w, 2.0).unwrap() <= 1e-10);
    }

    #[test]
    fn forced_zero_partner_relation() {
        let g = line(201);
        let qv: Vec<f64> = g.points().map(|x| x.sin() + 3.0).collect();
        let dqv: Vec<f64> = g.points().map(f64::cos).collect();
        let q = QmfSample::from_values(g, qv.clone(), Some(dqv.clone()), None).unwrap();
        let w = SampledFn::from_fn(g, |x| -x.sin());
        let wp = SampledFn::new(g, dqv.iter().map(|d| -d).collect()).unwrap();
        assert_eq!(partner_relation_residual(&q, &q, &w, &wp).unwrap(), 0.0);
    }

    #[test]
    fn pairing_rules() {
        let g = line(2001);
        let opts = SolverOptions::default();
        let a = solve_spectrum(&SampledFn::from_fn(g, |x| x * x), 1, &opts).unwrap();
        let b = solve_spectrum(&SampledFn::from_fn(g, |x| x * x + 0.5), 1, &opts).unwrap();
        assert!(matches!(
            pair_spectra(&a, &b, Phase::Broken, 1e-3),
            Err(Error::Pairing(_))
        ));
        assert!(matches!(
            pair_spectra(&a, &a, Phase::Unbroken, 1e-3),
            Err(Error::Pairing(_))
        ));
        assert_eq!(pair_spectra(&a, &a, Phase::Broken, 1e-3).unwrap().len(), 1);
    }
}
