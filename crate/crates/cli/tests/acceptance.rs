//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Tolerances are fixed here, not read from
//! scenario configs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;

use susylab::eigensolve::{refine_richardson, solve_spectrum, SolverOptions};
use susylab::numgrid::{Grid, SampledFn};
use susylab::potentials::RadialForm;
use susylab::susyqhj::{
    classical_polynomial, intertwining_from_states, partner_relation_residual,
    product_identity_residual, Polynomial, PolynomialKind, QmfSample, NODE_GUARD,
};
use susylab_cli::scenario::builtin;
use susylab_cli::{run_scenario, Report, RunOptions};

const SEED: u64 = 0x5eed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Reports(BTreeMap<&'static str, Report>);

impl Reports {
    fn load() -> Self {
        let ids = [
            "ho-unbroken",
            "radial-unbroken-1",
            "radial-unbroken-2",
            "radial-broken",
            "deform-sweep",
            "winding",
        ];
        let map = ids
            .into_iter()
            .map(|id| {
                let c = builtin(id).expect("built-in");
                let r = run_scenario(&c, &RunOptions::all(SEED)).expect("scenario runs");
                (id, r.report)
            })
            .collect();
        Self(map)
    }

    fn get(&self, id: &str) -> &Report {
        &self.0[id]
    }
}

fn unbroken_node_criterion(r: &Reports) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for id in ["ho-unbroken", "radial-unbroken-1", "radial-unbroken-2"] {
        let Some(g) = &r.get(id).gozzi else {
            return check(false, format!("{id}: no node report"));
        };
        let diffs: Vec<i64> = g.pairs.iter().map(|p| p.node_diff).collect();
        pass &= g.pairs.len() >= 6 && diffs.iter().take(6).all(|d| *d == 1);
        notes.push(format!("{id} {diffs:?}"));
    }
    check(pass, notes.join("; "))
}

fn broken_node_criterion(r: &Reports) -> Outcome {
    let rep = r.get("radial-broken");
    let Some(s) = &rep.spectra else {
        return check(false, "no spectra");
    };
    let mut worst = 0.0f64;
    for (n, (a, b)) in s
        .minus
        .energies
        .iter()
        .zip(&s.plus.energies)
        .enumerate()
        .take(5)
    {
        let exact = 4.0 * n as f64 + 8.0;
        worst = worst.max((a - exact).abs()).max((b - exact).abs());
    }
    let nodes_equal = s.minus.node_counts == s.plus.node_counts;
    let gozzi = rep
        .gozzi
        .as_ref()
        .is_some_and(|g| g.verdict && g.pairs.len() == 5);
    check(
        s.minus.energies.len() >= 5 && worst <= 1e-3 && nodes_equal && gozzi,
        format!(
            "max |E - (4n+8)| = {worst:.2e}, nodes {:?} / {:?}",
            s.minus.node_counts, s.plus.node_counts
        ),
    )
}

fn raised_l_identity() -> Outcome {
    let (omega, l) = (2.0, -2.5);
    let g = Grid::half_line(10.0, 4001).unwrap();
    let v2 = RadialForm::V2.sample(&g, omega, l).unwrap();
    let v1 = RadialForm::V1.sample(&g, omega, l + 1.0).unwrap();
    let (mut abs, mut rel) = (0.0f64, 0.0f64);
    for (a, b) in v2.values().iter().zip(v1.values()) {
        let d = (a - (b + 2.0 * omega)).abs();
        abs = abs.max(d);
        rel = rel.max(d / a.abs().max(1.0));
    }
    check(
        rel <= 1e-12,
        format!("max abs {abs:.2e}, max rel {rel:.2e}"),
    )
}

/// `ψ_n ∝ H_n(x) e^{−x²/2}` for `W = x`, with its exact QMF.
fn oscillator_state(n: i64, g: Grid) -> (SampledFn<f64>, QmfSample) {
    let h: Polynomial = classical_polynomial(PolynomialKind::Hermite, n).unwrap();
    let dh = h.derivative();
    let d2h = dh.derivative();
    let psi = SampledFn::from_fn(g, |x| h.eval(x) * (-x * x / 2.0).exp());
    let q: Vec<f64> = g.points().map(|x| -x + dh.eval(x) / h.eval(x)).collect();
    let dq: Vec<f64> = g
        .points()
        .map(|x| {
            let (p, dp, d2p) = (h.eval(x), dh.eval(x), d2h.eval(x));
            -1.0 + (d2p * p - dp * dp) / (p * p)
        })
        .collect();
    // trust samples above the amplitude floor and away from nodes
    let v = psi.values();
    let peak = psi.max_modulus();
    let mut mask: Vec<bool> = v.iter().map(|p| p.abs() >= 1e-6 * peak).collect();
    for i in 1..v.len() {
        if v[i - 1].signum() != v[i].signum() {
            let lo = (i - 1).saturating_sub(NODE_GUARD);
            let hi = (i + NODE_GUARD).min(v.len() - 1);
            mask[lo..=hi].iter_mut().for_each(|m| *m = false);
        }
    }
    let qmf = QmfSample::from_values(g, q, Some(dq), Some(mask)).unwrap();
    (psi, qmf)
}

fn refined_oscillator_grid() -> Grid {
    // ten times finer than the ho-unbroken grid
    Grid::full_line(-12.0, 12.0, 40001).unwrap()
}

fn cde(r: &Reports) -> Outcome {
    let mut numeric = 0.0f64;
    let mut count = 0;
    for id in [
        "ho-unbroken",
        "radial-unbroken-1",
        "radial-unbroken-2",
        "deform-sweep",
        "winding",
    ] {
        for e in &r.get(id).residuals.intertwining {
            numeric = numeric.max(e.cde_error);
            count += 1;
        }
    }
    let g = refined_oscillator_grid();
    let w = SampledFn::from_fn(g, |x| x);
    let mut analytic = 0.0f64;
    for n in 1..=6 {
        let (psi, _) = oscillator_state(n, g);
        let (chi, _) = oscillator_state(n - 1, g);
        let c = intertwining_from_states(&w, &psi, &chi, 2.0 * n as f64).unwrap();
        analytic = analytic.max(c.cde_error());
    }
    check(
        count >= 18 && numeric <= 1e-3 && analytic <= 1e-8,
        format!("{count} numerical pairs, max |CDE-1| = {numeric:.2e}; closed-form states {analytic:.2e}"),
    )
}

fn partner_relations(r: &Reports) -> Outcome {
    let (mut rel, mut prod, mut count) = (0.0f64, 0.0f64, 0);
    for rep in r.0.values() {
        for e in &rep.residuals.partner_relation {
            rel = rel.max(e.residual);
            count += 1;
        }
        for e in &rep.residuals.product_identity {
            prod = prod.max(e.residual);
        }
    }
    let g = refined_oscillator_grid();
    let w = SampledFn::from_fn(g, |x| x);
    let wp = SampledFn::from_fn(g, |_| 1.0);
    let (mut a_rel, mut a_prod) = (0.0f64, 0.0f64);
    for n in 1..=6 {
        let (_, q) = oscillator_state(n, g);
        let (_, k) = oscillator_state(n - 1, g);
        a_rel = a_rel.max(partner_relation_residual(&q, &k, &w, &wp).unwrap());
        a_prod = a_prod.max(product_identity_residual(&q, &k, &w, 2.0 * n as f64).unwrap());
    }
    check(
        count > 0 && rel <= 1e-3 && prod <= 1e-3 && a_rel <= 1e-8 && a_prod <= 1e-8,
        format!(
            "numerical: relation {rel:.2e}, product {prod:.2e} over {count} pairs; closed-form: {a_rel:.2e}, {a_prod:.2e}"
        ),
    )
}

fn riccati(r: &Reports) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut solved = 0;
    for rep in r.0.values() {
        for e in &rep.residuals.riccati {
            worst = worst.max(e.residual);
            count += 1;
        }
        if let Some(s) = &rep.spectra {
            solved += s.minus.energies.len() + s.plus.energies.len();
        }
    }
    check(
        count == solved && worst <= 1e-3,
        format!("{count} of {solved} states, max residual {worst:.2e}"),
    )
}

fn winding(r: &Reports) -> Outcome {
    let Some(w) = &r.get("winding").winding else {
        return check(false, "no winding results");
    };
    let states_ok = (0..=8).all(|n| {
        w.states
            .iter()
            .any(|s| s.n == n && s.rounded == n as i64 && s.rounding_error <= 1e-6)
    });
    let worst = w
        .states
        .iter()
        .map(|s| s.rounding_error)
        .fold(0.0, f64::max);
    let diffs = w.differences.iter().filter(|d| d.error <= 1e-6).count();
    let worst_diff = w.differences.iter().map(|d| d.error).fold(0.0, f64::max);
    check(
        states_ok && diffs >= 3,
        format!("n = 0..8 max rounding error {worst:.2e}; {diffs} adjacent differences, max |diff-1| = {worst_diff:.2e}"),
    )
}

fn deformation(r: &Reports) -> Outcome {
    let Some(d) = &r.get("deform-sweep").deformation else {
        return check(false, "no deformation results");
    };
    let mut pass = true;
    let mut worst = [0.0f64; 4];
    for lambda in [0.25, 1.0, 10.0, -1.5] {
        let Some(f) = d.families.iter().find(|f| f.lambda == lambda) else {
            return check(false, format!("lambda = {lambda} missing"));
        };
        let Some(iso) = &f.isospectrality else {
            return check(false, format!("lambda = {lambda}: no spectra"));
        };
        pass &= f.strictness_residual <= 1e-4
            && f.strictness_refined <= 1e-6
            && f.bernoulli_residual <= 1e-6
            && iso.energies.len() == 5
            && iso.max_level_deviation <= 1e-3
            && iso.node_counts_equal;
        worst[0] = worst[0].max(f.strictness_residual);
        worst[1] = worst[1].max(f.strictness_refined);
        worst[2] = worst[2].max(f.bernoulli_residual);
        worst[3] = worst[3].max(iso.max_level_deviation);
    }
    let recovery = d.recovery.as_ref().map_or(f64::INFINITY, |v| v.value);
    check(
        pass && recovery <= 1e-4,
        format!(
            "strictness {:.2e} (refined {:.2e}), Bernoulli {:.2e}, level deviation {:.2e}, recovery {recovery:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn solver_oracles(r: &Reports) -> Outcome {
    let opts = SolverOptions::default();
    let g = Grid::full_line(-12.0, 12.0, 4001).unwrap();
    let osc = refine_richardson(|g| Ok(SampledFn::from_fn(*g, |x| x * x)), &g, 6, &opts).unwrap();
    let osc_err = osc
        .energies
        .iter()
        .enumerate()
        .map(|(n, e)| (e - (2.0 * n as f64 + 1.0)).abs())
        .fold(0.0, f64::max);
    let length = 1.0;
    let bg = Grid::full_line(0.0, length, 1001).unwrap();
    let boxed = solve_spectrum(&SampledFn::from_fn(bg, |_| 0.0), 5, &opts).unwrap();
    let box_err = boxed
        .energies()
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let exact = ((n as f64 + 1.0) * PI / length).powi(2);
            (e - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    let direct = osc
        .extrapolated(opts.node_eps_rel)
        .unwrap()
        .eigenpairs
        .iter()
        .chain(&boxed.eigenpairs)
        .all(|p| p.node_count == p.index);
    let scenarios =
        r.0.values()
            .all(|rep| rep.verdicts.get("oscillation") == Some(&true));
    check(
        osc_err <= 1e-6 && box_err <= 1e-3 && direct && scenarios,
        format!(
            "oscillator {osc_err:.2e}, box {:.3}%, node count = index: {}",
            100.0 * box_err,
            direct && scenarios
        ),
    )
}

fn determinism() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for id in ["ho-unbroken", "radial-broken", "deform-sweep"] {
        let c = builtin(id).unwrap();
        let a = run_scenario(&c, &RunOptions::all(SEED))
            .unwrap()
            .report
            .render_without_timing();
        let b = run_scenario(&c, &RunOptions::all(SEED))
            .unwrap()
            .report
            .render_without_timing();
        pass &= a == b;
        notes.push(format!(
            "{id}: {} bytes{}",
            a.len(),
            if a == b { "" } else { " DIFFER" }
        ));
    }
    check(pass, notes.join("; "))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let reports = Reports::load();
    let criteria: [Criterion; 10] = [
        (
            "unbroken node criterion",
            Box::new(|| unbroken_node_criterion(&reports)),
        ),
        (
            "broken node criterion",
            Box::new(|| broken_node_criterion(&reports)),
        ),
        ("V2(l) = V1(l+1) + 2 omega", Box::new(raised_l_identity)),
        ("CDE = 1", Box::new(|| cde(&reports))),
        (
            "partner relation and product identity",
            Box::new(|| partner_relations(&reports)),
        ),
        ("Riccati residuals", Box::new(|| riccati(&reports))),
        ("quantization winding", Box::new(|| winding(&reports))),
        (
            "isospectral deformation",
            Box::new(|| deformation(&reports)),
        ),
        ("solver oracles", Box::new(|| solver_oracles(&reports))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<40} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
