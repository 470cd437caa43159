use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toricabel::abel::{fit_rational, random_polynomial, support_of, FitConfig};
use toricabel::bundles::{LineBundle, Section};
use toricabel::io::to_json;
use toricabel::numeric::{jacobian_det, CPoly};
use toricabel::{
    is_essential, minkowski_sum, mixed_volume, normalized_volume, orbital_decomposition, residue_sum, solve_bivariate,
    FaceMode, Fan, Polytope, SplitBundle, TDivisor, Tolerances, C64,
};

fn points() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..=3, 0i64..=3), 1..5)
}

fn polytope(pts: &[(i64, i64)]) -> Polytope {
    let v: Vec<[i64; 2]> = pts.iter().map(|&(a, b)| [a, b]).collect();
    let refs: Vec<&[i64]> = v.iter().map(|x| x.as_slice()).collect();
    Polytope::from_i64_points(2, &refs)
}

fn mv(p: &Polytope, q: &Polytope) -> BigRational {
    mixed_volume(&[p.clone(), q.clone()], 2).unwrap()
}

fn fans() -> Vec<Arc<Fan>> {
    vec![
        Arc::new(Fan::projective_plane()),
        Arc::new(Fan::product_of_lines(2)),
        Arc::new(Fan::hirzebruch(1)),
        Arc::new(Fan::hirzebruch(2)),
    ]
}

fn line_bundle() -> impl Strategy<Value = LineBundle> {
    (0usize..4, prop::collection::vec(-1i64..=3, 4)).prop_map(|(i, k)| {
        let fan = fans()[i].clone();
        let r = fan.rays().len();
        LineBundle::new(fan, TDivisor::from_i64(&k[..r])).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixed_volume_is_symmetric(p in points(), q in points()) {
        let (p, q) = (polytope(&p), polytope(&q));
        prop_assert_eq!(mv(&p, &q), mv(&q, &p));
    }

    #[test]
    fn mixed_volume_on_the_diagonal_is_the_normalized_volume(p in points()) {
        let p = polytope(&p);
        prop_assert_eq!(mv(&p, &p), normalized_volume(&p, 2).unwrap());
    }

    #[test]
    fn mixed_volume_is_additive_under_minkowski_sums(p in points(), r in points(), q in points()) {
        let (p, r, q) = (polytope(&p), polytope(&r), polytope(&q));
        let pr = minkowski_sum(&p, &r).unwrap();
        prop_assert_eq!(mv(&pr, &q), mv(&p, &q) + mv(&r, &q));
    }

    #[test]
    fn mixed_volume_is_positive_iff_essential(p in points(), q in points()) {
        let fam = [polytope(&p), polytope(&q)];
        let v = mixed_volume(&fam, 2).unwrap();
        prop_assert!(!v.is_negative());
        prop_assert_eq!(v.is_positive(), is_essential(&fam));
    }

    #[test]
    fn faces_lie_in_the_polytope(l in line_bundle()) {
        let p = l.polytope();
        for tau in l.fan().all_cones() {
            for mode in [FaceMode::Mobile, FaceMode::Virtual] {
                let face = l.face(tau, mode).unwrap();
                for v in face.vertices() {
                    prop_assert!(p.contains_q(v), "{tau} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn chart_exponents_are_nonnegative(l in line_bundle()) {
        for sigma in l.fan().max_cones() {
            for m in l.polytope().lattice_points() {
                let ex = l.chart_exponent(m, sigma).unwrap();
                prop_assert!(ex.iter().all(|x| !x.is_negative()));
            }
        }
    }

    #[test]
    fn mobile_part_has_no_fixed_part(l in line_bundle()) {
        prop_assume!(!l.polytope().lattice_points().is_empty());
        let (mobile, fixed) = l.mobile_fixed_split().unwrap();
        prop_assert_eq!(mobile.add(&fixed), l.divisor().clone());
        let again = LineBundle::new(l.fan().clone(), mobile.clone()).unwrap();
        let (mobile2, fixed2) = again.mobile_fixed_split().unwrap();
        prop_assert_eq!(mobile2, mobile);
        prop_assert!(fixed2.is_zero());
        prop_assert!(again.is_globally_generated());
    }

    #[test]
    fn gg_bundles_have_at_most_the_trivial_row(i in 0usize..4, k1 in prop::collection::vec(0i64..=2, 4), k2 in prop::collection::vec(0i64..=2, 4)) {
        let fan = fans()[i].clone();
        let r = fan.rays().len();
        let e = SplitBundle::new(fan, vec![TDivisor::from_i64(&k1[..r]), TDivisor::from_i64(&k2[..r])]).unwrap();
        prop_assume!(e.is_globally_generated());
        let table = orbital_decomposition(&e).unwrap();
        prop_assert!(table.entries.len() <= 1);
        prop_assert_eq!(table.entries.len() == 1, e.is_essential());
    }
}

fn dense(d: i64, rng: &mut ChaCha8Rng) -> CPoly {
    random_polynomial(2, &support_of(&Polytope::simplex(2, d)).unwrap(), rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swapping_the_equations_negates_the_residue_sum(seed in any::<u64>(), d1 in 1i64..=3, d2 in 1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (dense(d1, &mut rng), dense(d2, &mut rng), dense(2, &mut rng));
        let sols = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        prop_assume!(sols.all_transversal());
        let a = residue_sum(&h, &[f.clone(), g.clone()], &sols).unwrap();
        let b = residue_sum(&h, &[g, f], &sols).unwrap();
        prop_assert!((a + b).norm() <= 1e-9 * (1.0 + a.norm()));
    }

    #[test]
    fn euler_jacobi_vanishing(seed in any::<u64>(), d1 in 2i64..=3, d2 in 1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (dense(d1, &mut rng), dense(d2, &mut rng));
        let h = dense(d1 + d2 - 3, &mut rng);
        let sys = [f.clone(), g.clone()];
        let sols = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        prop_assume!(sols.all_transversal() && sols.len() as i64 == d1 * d2);
        let scale: f64 = sols.points.iter().map(|p| (h.eval(p) / jacobian_det(&sys, p)).norm()).sum();
        let s = residue_sum(&h, &sys, &sols).unwrap();
        prop_assert!(s.norm() <= 1e-8 * scale.max(1.0), "{} vs {}", s.norm(), scale);
    }

    #[test]
    fn solution_count_is_the_mixed_volume(seed in any::<u64>(), p in points(), q in points()) {
        // supports are all lattice points of hulls through the origin
        let mut p = p; p.push((0, 0));
        let mut q = q; q.push((0, 0));
        let (pp, qq) = (polytope(&p), polytope(&q));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_polynomial(2, &support_of(&pp).unwrap(), &mut rng);
        let g = random_polynomial(2, &support_of(&qq).unwrap(), &mut rng);
        let want = mv(&pp, &qq);
        prop_assume!(!want.is_zero());
        let sols = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        prop_assert_eq!(BigRational::from_integer(BigInt::from(sols.len())), want);
        prop_assert!(sols.max_residual() <= 1e-10);
    }

    #[test]
    fn rational_functions_are_recovered(seed in any::<u64>(), dn in 0usize..=2, dd in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let num: Vec<C64> = (0..=dn).map(|_| toricabel::bundles::random_unit_disc(&mut rng)).collect();
        let mut den: Vec<C64> = (0..=dd).map(|_| 0.3 * toricabel::bundles::random_unit_disc(&mut rng)).collect();
        den[0] = C64::new(1.0, 0.0);
        let horner = |c: &[C64], z: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, x| acc * z + x);
        let eval = |z: C64| horner(&num, z) / horner(&den, z);
        let nodes: Vec<C64> = (0..16).map(|k| C64::from_polar(0.6 + 0.05 * k as f64, 0.9 * k as f64)).collect();
        let values: Vec<Vec<C64>> = nodes.iter().map(|&z| vec![eval(z)]).collect();
        let (fit, rational) = fit_rational(&nodes, &values, &FitConfig::with_caps(4, 1e-8)).unwrap();
        prop_assert!(rational);
        prop_assert!(fit.num_degree + fit.den_degree <= dn + dd);
        for z in [C64::new(0.2, 0.1), C64::new(-0.5, 0.3)] {
            prop_assert!((fit.eval(0, z) - eval(z)).norm() <= 1e-7 * (1.0 + eval(z).norm()));
        }
    }

    #[test]
    fn polynomials_survive_a_json_round_trip(seed in any::<u64>(), d in 0i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = dense(d, &mut rng);
        let back: CPoly = serde_json::from_str(&to_json(&p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn sections_give_chart_polynomials_on_the_chart_support(seed in any::<u64>(), i in 0usize..4, k in prop::collection::vec(0i64..=2, 4)) {
        let fan = fans()[i].clone();
        let r = fan.rays().len();
        let l = LineBundle::new(fan.clone(), TDivisor::from_i64(&k[..r])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Section::random(&l, &mut rng);
        for sigma in fan.max_cones() {
            let g = l.chart_polynomial(&s, sigma).unwrap();
            prop_assert_eq!(g.support().len(), l.sections());
        }
    }
}
