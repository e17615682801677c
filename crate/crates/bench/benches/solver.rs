use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use susylab::deform::{build_family, DeformationParams};
use susylab::eigensolve::{refine_richardson, solve_spectrum, SolverOptions};
use susylab::numgrid::Grid;
use susylab::potentials::{partner_potentials, Superpotential};
use susylab::susyqhj::{
    classical_polynomial, qmf_from_wavefunction, riccati_residual, winding_number, PolynomialKind,
    RectContour,
};

fn oscillator() -> (Superpotential, Grid) {
    (
        Superpotential::Oscillator { omega: 2.0 },
        Grid::full_line(-12.0, 12.0, 4001).unwrap(),
    )
}

fn eigensolver(c: &mut Criterion) {
    let (w, g) = oscillator();
    let opts = SolverOptions::default();
    let v = partner_potentials(&w, &g).unwrap().v_minus;
    c.bench_function("solve_spectrum 4001 pts, 7 levels", |b| {
        b.iter(|| solve_spectrum(black_box(&v), 7, &opts).unwrap())
    });
    c.bench_function("refine_richardson 4001 pts, 7 levels", |b| {
        b.iter(|| {
            refine_richardson(
                |g| Ok(partner_potentials(&w, g)?.v_minus),
                black_box(&g),
                7,
                &opts,
            )
            .unwrap()
        })
    });
}

fn qmf(c: &mut Criterion) {
    let (w, g) = oscillator();
    let pp = partner_potentials(&w, &g).unwrap();
    let s = solve_spectrum(&pp.v_minus, 5, &SolverOptions::default()).unwrap();
    let psi = &s.eigenpairs[4];
    c.bench_function("qmf + riccati residual, n = 4", |b| {
        b.iter(|| {
            let q = qmf_from_wavefunction(black_box(&psi.wavefunction)).unwrap();
            riccati_residual(&q, psi.energy, &pp.v_minus).unwrap()
        })
    });
}

fn winding(c: &mut Criterion) {
    let (w, _) = oscillator();
    let p = classical_polynomial(PolynomialKind::Hermite, 8).unwrap();
    let contour = RectContour::new(-6.2, 6.2, 1.0, RectContour::DEFAULT_SAMPLES).unwrap();
    c.bench_function("winding number, H8, 512 samples/side", |b| {
        b.iter(|| winding_number(&w, black_box(&p), &contour).unwrap())
    });
}

fn deformation(c: &mut Criterion) {
    let (w, g) = oscillator();
    let params = DeformationParams::new(0.25).unwrap();
    c.bench_function("deformed family, 4001 pts", |b| {
        b.iter(|| build_family(&w, black_box(&g), params).unwrap())
    });
}

criterion_group!(benches, eigensolver, qmf, winding, deformation);
criterion_main!(benches);
