use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toricabel::abel::{self, random_polynomial, support_of, InversionConfig, LineFamily};
use toricabel::numeric::{univariate_roots, CPoly1};
use toricabel::{mixed_volume, solve_bivariate, Fan, Polytope, SplitBundle, Tolerances, C64};

fn mixed_volumes(c: &mut Criterion) {
    let d = Polytope::simplex(2, 3);
    let sq = Polytope::cube(2, 2);
    c.bench_function("mixed_volume 2d", |b| {
        b.iter(|| mixed_volume(black_box(&[d.clone(), sq.clone()]), 2).unwrap())
    });
    let cube = Polytope::cube(3, 1);
    let simplex = Polytope::simplex(3, 2);
    c.bench_function("mixed_volume 3d", |b| {
        b.iter(|| mixed_volume(black_box(&[cube.clone(), simplex.clone(), cube.clone()]), 3).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let roots: Vec<C64> = (0..12)
        .map(|k| C64::from_polar(1.0 + 0.1 * k as f64, 0.7 * k as f64))
        .collect();
    let p = CPoly1::from_roots(&roots);
    c.bench_function("univariate_roots degree 12", |b| {
        b.iter(|| univariate_roots(black_box(&p), 1e-10, 1e-7).unwrap())
    });
    let s3 = support_of(&Polytope::simplex(2, 3)).unwrap();
    let f = random_polynomial(2, &s3, &mut rng);
    let g = random_polynomial(2, &s3, &mut rng);
    let tols = Tolerances::default();
    c.bench_function("solve_bivariate cubics", |b| {
        b.iter(|| solve_bivariate(black_box(&f), black_box(&g), &tols).unwrap())
    });
}

fn inversion(c: &mut Criterion) {
    let fan = Arc::new(Fan::projective_plane());
    let e = SplitBundle::from_i64(&fan, &[&[0, 0, 1]]).unwrap();
    let family = LineFamily::new(&e, &fan.max_cones()[0]).unwrap();
    let s2 = support_of(&Polytope::simplex(2, 2)).unwrap();
    let s1 = support_of(&Polytope::simplex(2, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_polynomial(2, &s2, &mut rng);
    let h = random_polynomial(2, &s1, &mut rng);
    let cfg = InversionConfig::default();
    c.bench_function("invert conic", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            abel::invert(&f, &h, &family, &s2, &cfg, &mut rng).unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = mixed_volumes, solver, inversion
}
criterion_main!(benches);
