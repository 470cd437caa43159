//! The curve, the form and the linear system of test curves in one chart.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::bundles::{random_unit_disc, LineBundle, SplitBundle, TDivisor};
use crate::decomposition::CycleClass;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::lattice::{self, IVec};
use crate::numeric::{CPoly, C64};
use crate::polytope::Polytope;

/// Sections `l(a,x) = Σ_m a_m x^m` of a rank-one bundle on a surface,
/// written in the chart of σ.
#[derive(Debug, Clone)]
pub struct LineFamily {
    bundle: LineBundle,
    sigma: Cone,
    exponents: Vec<Vec<u32>>,
    base: usize,
}

impl LineFamily {
    pub fn new(e: &SplitBundle, sigma: &Cone) -> Result<LineFamily> {
        let fan = e.fan();
        if fan.dim() != 2 {
            return Err(Error::Dimension(format!(
                "inversion is implemented for surfaces, got dimension {}",
                fan.dim()
            )));
        }
        if e.rank() != 1 {
            return Err(Error::Dimension(format!(
                "inversion on a surface needs a rank-one bundle, got rank {}",
                e.rank()
            )));
        }
        if !fan.max_cones().contains(sigma) {
            return Err(Error::Malformed(format!("{sigma} is not a maximal cone")));
        }
        if !e.satisfies_condition_star(sigma)? {
            return Err(Error::ConditionStar(format!(
                "the chart polytope at {sigma} misses a vertex of the elementary simplex"
            )));
        }
        let bundle = e.line_bundles()[0].clone();
        let mut exponents = Vec::new();
        for m in bundle.polytope().lattice_points() {
            let ex = bundle.chart_exponent(m, sigma)?;
            exponents.push(
                ex.iter()
                    .map(|x| x.to_u32().expect("nonnegative exponent"))
                    .collect::<Vec<u32>>(),
            );
        }
        let base = exponents
            .iter()
            .position(|e| e.iter().all(|&x| x == 0))
            .expect("condition (*) puts the origin in the chart polytope");
        Ok(LineFamily {
            bundle,
            sigma: sigma.clone(),
            exponents,
            base,
        })
    }

    pub fn bundle(&self) -> &LineBundle {
        &self.bundle
    }

    pub fn sigma(&self) -> &Cone {
        &self.sigma
    }

    /// Number of coefficients `a_m`.
    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Index of the constant coefficient `a_0`.
    pub fn base_index(&self) -> usize {
        self.base
    }

    pub fn exponent_index(&self, e: &[u32]) -> Option<usize> {
        self.exponents.iter().position(|x| x == e)
    }

    /// `Δ_{D,σ}`.
    pub fn chart_polytope(&self) -> Result<&Polytope> {
        Ok(&self.bundle.chart(&self.sigma)?.delta)
    }

    pub fn line(&self, a: &[C64]) -> CPoly {
        CPoly::from_terms(2, self.exponents.iter().cloned().zip(a.iter().copied()))
    }

    /// `l′(x) = −Σ_{m≠0} a_m x^m`, so that `l = a_0 − l′`.
    pub fn l_prime(&self, a: &[C64]) -> CPoly {
        CPoly::from_terms(
            2,
            self.exponents
                .iter()
                .zip(a)
                .enumerate()
                .filter(|(i, _)| *i != self.base)
                .map(|(_, (e, c))| (e.clone(), -c)),
        )
    }

    pub fn with_base(&self, a: &[C64], a0: C64) -> Vec<C64> {
        let mut out = a.to_vec();
        out[self.base] = a0;
        out
    }

    pub fn random_coefficients<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<C64> {
        (0..self.size()).map(|_| random_unit_disc(rng)).collect()
    }
}

/// Exponents of the lattice points of a polytope in the positive quadrant.
pub fn support_of(p: &Polytope) -> Result<Vec<Vec<u32>>> {
    p.lattice_points()
        .iter()
        .map(|m| {
            m.iter()
                .map(|x| {
                    x.to_u32()
                        .ok_or_else(|| Error::Malformed("support must lie in the positive orthant".into()))
                })
                .collect()
        })
        .collect()
}

/// A polynomial with independent unit-disc coefficients on `support`.
pub fn random_polynomial<R: Rng + ?Sized>(nvars: usize, support: &[Vec<u32>], rng: &mut R) -> CPoly {
    CPoly::from_terms(nvars, support.iter().map(|e| (e.clone(), random_unit_disc(rng))))
}

/// Torus-invariant divisor of the closure of `{p = 0}` for a Laurent
/// polynomial supported on `support` in the chart of σ.
pub fn curve_divisor(fan: &Fan, sigma: &Cone, support: &[Vec<u32>]) -> Result<TDivisor> {
    if support.is_empty() {
        return Err(Error::Malformed("empty support".into()));
    }
    let frame = fan.chart_frame(sigma)?;
    let pts: Vec<IVec> = support
        .iter()
        .map(|e| {
            let mut m = vec![BigInt::zero(); fan.dim()];
            for (ei, row) in e.iter().zip(&frame.dual_basis) {
                for (mj, rj) in m.iter_mut().zip(row) {
                    *mj += rj * BigInt::from(*ei);
                }
            }
            m
        })
        .collect();
    let k = fan
        .rays()
        .iter()
        .map(|r| {
            -pts.iter()
                .map(|m| lattice::dot(m, &r.eta))
                .min()
                .expect("nonempty support")
        })
        .collect();
    Ok(TDivisor::new(k))
}

/// The same divisor as a one-dimensional cycle class on a surface.
pub fn curve_class(fan: &Fan, sigma: &Cone, support: &[Vec<u32>]) -> Result<CycleClass> {
    if fan.dim() != 2 {
        return Err(Error::Dimension("curve classes are built on surfaces".into()));
    }
    let d = curve_divisor(fan, sigma, support)?;
    let mut cls = CycleClass::zero(1);
    for (i, k) in d.k.iter().enumerate() {
        if !k.is_zero() {
            cls = cls.with(Cone::ray(i), k.to_i64().expect("small coefficient"));
        }
    }
    Ok(cls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::cycle_intersection;
    use std::sync::Arc;

    #[test]
    fn line_family_on_the_plane() {
        let fan = Arc::new(Fan::projective_plane());
        let e = SplitBundle::from_i64(&fan, &[&[0, 0, 1]]).unwrap();
        let sigma = fan.max_cones()[0].clone();
        let fam = LineFamily::new(&e, &sigma).unwrap();
        assert_eq!(fam.size(), 3);
        let mut ex = fam.exponents().to_vec();
        ex.sort();
        assert_eq!(ex, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let a = vec![C64::new(2.0, 0.0); 3];
        let lp = fam.l_prime(&a);
        assert_eq!(lp.coeff(&[0, 0]), C64::new(0.0, 0.0));
        assert_eq!(lp.coeff(&[1, 0]), C64::new(-2.0, 0.0));
    }

    #[test]
    fn rejects_rank_two_and_missing_star() {
        let fan = Arc::new(Fan::projective_plane());
        let sigma = fan.max_cones()[0].clone();
        let e = SplitBundle::from_i64(&fan, &[&[0, 0, 1], &[0, 0, 1]]).unwrap();
        assert!(matches!(LineFamily::new(&e, &sigma), Err(Error::Dimension(_))));
        let pp = Arc::new(Fan::product_of_lines(2));
        let e = SplitBundle::from_i64(&pp, &[&[0, 2, 0, 0]]).unwrap();
        let sigma = pp.max_cones()[0].clone();
        assert!(matches!(LineFamily::new(&e, &sigma), Err(Error::ConditionStar(_))));
    }

    #[test]
    fn curve_classes_meet_the_bundle_in_the_chart_count() {
        let fan = Arc::new(Fan::projective_plane());
        let sigma = fan.max_cones()[0].clone();
        let cubic = support_of(&Polytope::simplex(2, 3)).unwrap();
        let cls = curve_class(&fan, &sigma, &cubic).unwrap();
        let e = SplitBundle::from_i64(&fan, &[&[0, 0, 1]]).unwrap();
        assert_eq!(cycle_intersection(&e, &cls).unwrap(), BigInt::from(3));

        let pp = Arc::new(Fan::product_of_lines(2));
        let sigma = pp.max_cones()[0].clone();
        let box21: Vec<Vec<u32>> = (0..=2).flat_map(|i| (0..=1).map(move |j| vec![i, j])).collect();
        let cls = curve_class(&pp, &sigma, &box21).unwrap();
        let e = SplitBundle::from_i64(&pp, &[&[0, 1, 0, 1]]).unwrap();
        assert_eq!(cycle_intersection(&e, &cls).unwrap(), BigInt::from(3));
    }
}
