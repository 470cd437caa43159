//! Orbital decomposition of generic E-subschemes, intersection numbers as
//! mixed volumes, degenerate classes and resultant multidegrees.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bundles::{FaceMode, SplitBundle};
use crate::error::{Error, Result};
use crate::fan::Cone;
use crate::polytope::{self, Polytope};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitalEntry {
    /// Indices (0-based) of the line bundles in `I`.
    pub subset: Vec<usize>,
    pub tau: Cone,
    /// Codimension of the orbit closure `V(τ)`.
    pub codim: usize,
    /// `i ∉ I` whose virtual face at τ is empty (all of them).
    pub empty_virtual: Vec<usize>,
    /// Dimensions of the mobile faces `P_i^τ`, `i ∈ I`.
    pub mobile_dims: Vec<i64>,
}

/// The pairs `(I, τ)` with `ν_{I,τ} = 1`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OrbitalTable {
    pub entries: Vec<OrbitalEntry>,
    /// Number of `(I, τ)` pairs examined.
    pub candidates: usize,
}

impl OrbitalTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A cycle class `Σ ν_τ [V(τ)]` of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleClass {
    pub dim: usize,
    #[serde(serialize_with = "crate::pairs::serialize")]
    pub coeffs: BTreeMap<Cone, BigInt>,
}

impl CycleClass {
    pub fn zero(dim: usize) -> Self {
        CycleClass {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn orbit(dim: usize, tau: Cone) -> Self {
        let mut c = CycleClass::zero(dim);
        c.coeffs.insert(tau, BigInt::one());
        c
    }

    pub fn with(mut self, tau: Cone, nu: i64) -> Self {
        *self.coeffs.entry(tau).or_insert_with(BigInt::zero) += nu;
        self
    }

    pub fn add(&self, other: &CycleClass) -> CycleClass {
        let mut c = self.clone();
        for (t, v) in &other.coeffs {
            *c.coeffs.entry(t.clone()).or_insert_with(BigInt::zero) += v;
        }
        c
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.dim > n {
            return Err(Error::Dimension(format!(
                "cycle of dimension {} in dimension {n}",
                self.dim
            )));
        }
        for t in self.coeffs.keys() {
            if t.dim() + self.dim != n {
                return Err(Error::Dimension(format!(
                    "orbit {t} has dimension {}, the class has dimension {}",
                    n - t.dim(),
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

fn subsets_of(k: usize) -> Vec<Vec<usize>> {
    (0u64..(1u64 << k))
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// The ν-table: `(I, τ)` is present iff (i) the virtual faces at τ of the
/// bundles outside `I` are empty, (ii) for every proper face τ′ of τ some
/// bundle outside `I` has a nonempty virtual face at τ′, and (iii) the mobile
/// faces at τ of the bundles in `I` form an essential family.
pub fn orbital_decomposition(e: &SplitBundle) -> Result<OrbitalTable> {
    let fan = e.fan();
    let n = fan.dim();
    let k = e.rank();
    let cones: Vec<Cone> = fan.all_cones().cloned().collect();
    let mut virt: BTreeMap<Cone, Vec<bool>> = BTreeMap::new();
    for tau in &cones {
        let row = e
            .line_bundles()
            .iter()
            .map(|l| l.face(tau, FaceMode::Virtual).map(|p| !p.is_empty()))
            .collect::<Result<Vec<bool>>>()?;
        virt.insert(tau.clone(), row);
    }
    let subsets = subsets_of(k);
    let pairs: Vec<(Vec<usize>, Cone)> = cones
        .iter()
        .flat_map(|t| subsets.iter().map(move |s| (s.clone(), t.clone())))
        .collect();
    let candidates = pairs.len();
    let found: Vec<Option<OrbitalEntry>> = pairs
        .into_par_iter()
        .map(|(subset, tau)| -> Result<Option<OrbitalEntry>> {
            let outside: Vec<usize> = (0..k).filter(|i| !subset.contains(i)).collect();
            if outside.iter().any(|&i| virt[&tau][i]) {
                return Ok(None);
            }
            for face in tau.proper_faces() {
                if !outside.iter().any(|&i| virt[&face][i]) {
                    return Ok(None);
                }
            }
            let faces = subset
                .iter()
                .map(|&i| e.line_bundles()[i].face(&tau, FaceMode::Mobile))
                .collect::<Result<Vec<Polytope>>>()?;
            if !polytope::is_essential(&faces) {
                return Ok(None);
            }
            Ok(Some(OrbitalEntry {
                mobile_dims: faces.iter().map(|p| p.dimension()).collect(),
                subset,
                codim: tau.dim(),
                tau,
                empty_virtual: outside,
            }))
        })
        .collect::<Result<_>>()?;
    let mut entries: Vec<OrbitalEntry> = found.into_iter().flatten().collect();
    entries.sort_by(|a, b| (a.codim, &a.tau, &a.subset).cmp(&(b.codim, &b.tau, &b.subset)));
    debug_assert!(entries.iter().all(|en| en.codim <= n));
    Ok(OrbitalTable { entries, candidates })
}

fn to_integer(q: num_rational::BigRational) -> Result<BigInt> {
    if !q.is_integer() {
        return Err(Error::Numeric(format!(
            "mixed volume {q} of lattice polytopes is not an integer"
        )));
    }
    Ok(q.to_integer())
}

/// `V(τ) · L_1 ⋯ L_k` as the mixed volume of the mobile faces at τ.
pub fn intersection_number(e: &SplitBundle, tau: &Cone) -> Result<BigInt> {
    let n = e.fan().dim();
    let k = e.rank();
    if tau.dim() + k != n {
        return Err(Error::Dimension(format!(
            "V({tau}) has dimension {}, the bundle has rank {k}",
            n - tau.dim()
        )));
    }
    let faces = e
        .line_bundles()
        .iter()
        .map(|l| l.face(tau, FaceMode::Mobile))
        .collect::<Result<Vec<_>>>()?;
    to_integer(polytope::mixed_volume(&faces, k)?)
}

/// Intersection numbers on every orbit closure of dimension `k`.
pub fn positivity_table(e: &SplitBundle) -> Result<Vec<(Cone, BigInt)>> {
    let n = e.fan().dim();
    e.fan()
        .cones_of_dim(n - e.rank())?
        .iter()
        .map(|t| Ok((t.clone(), intersection_number(e, t)?)))
        .collect()
}

/// All intersection numbers on `k`-dimensional orbit closures are positive.
pub fn satisfies_positivity(e: &SplitBundle) -> Result<bool> {
    Ok(positivity_table(e)?.iter().all(|(_, v)| v.is_positive()))
}

pub fn cycle_intersection(e: &SplitBundle, cls: &CycleClass) -> Result<BigInt> {
    cls.check(e.fan().dim())?;
    if cls.dim != e.rank() {
        return Err(Error::Dimension(format!(
            "class of dimension {} against a rank-{} bundle",
            cls.dim,
            e.rank()
        )));
    }
    let mut acc = BigInt::zero();
    for (tau, nu) in &cls.coeffs {
        if !nu.is_zero() {
            acc += nu * intersection_number(e, tau)?;
        }
    }
    Ok(acc)
}

pub fn is_degenerate_class(e: &SplitBundle, cls: &CycleClass) -> Result<bool> {
    Ok(cycle_intersection(e, cls)?.is_zero())
}

/// Codimension of the dual variety of a `dim_v`-dimensional subvariety.
pub fn dual_codim(dim_v: usize, k: usize) -> usize {
    k.saturating_sub(dim_v)
}

/// `(d_1, …, d_k)` with `d_i = Σ_τ ν_τ MV_{k−1}(P_j^τ, j ≠ i)`.
pub fn resultant_multidegree(e: &SplitBundle, w: &CycleClass) -> Result<Vec<BigInt>> {
    let n = e.fan().dim();
    let k = e.rank();
    w.check(n)?;
    if w.dim + 1 != k {
        return Err(Error::Dimension(format!(
            "a rank-{k} bundle needs a cycle of dimension {}, got {}",
            k - 1,
            w.dim
        )));
    }
    if w.coeffs.values().any(|v| v.is_negative()) {
        return Err(Error::Malformed("the cycle must be effective".into()));
    }
    let mut d = vec![BigInt::zero(); k];
    for (tau, nu) in &w.coeffs {
        if nu.is_zero() {
            continue;
        }
        let faces = e
            .line_bundles()
            .iter()
            .map(|l| l.face(tau, FaceMode::Mobile))
            .collect::<Result<Vec<_>>>()?;
        for (i, di) in d.iter_mut().enumerate() {
            let rest: Vec<Polytope> = faces
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.clone())
                .collect();
            *di += nu * to_integer(polytope::mixed_volume(&rest, k - 1)?)?;
        }
    }
    Ok(d)
}

/// Projective dimensions `l(D_i) − 1` of the factors of the parameter space.
pub fn parameter_space_shape(e: &SplitBundle) -> Vec<i64> {
    e.line_bundles().iter().map(|l| l.sections() as i64 - 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;
    use std::sync::Arc;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn globally_generated_tables() {
        let p2 = Arc::new(Fan::projective_plane());
        let e = SplitBundle::from_i64(&p2, &[&[0, 0, 1], &[0, 0, 2]]).unwrap();
        let t = orbital_decomposition(&e).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries[0].subset, vec![0, 1]);
        assert_eq!(t.entries[0].tau, Cone::zero());

        // two copies of O(2,0) on P^1×P^1 are not essential
        let q = Arc::new(Fan::product_of_lines(2));
        let e = SplitBundle::from_i64(&q, &[&[0, 2, 0, 0], &[0, 2, 0, 0]]).unwrap();
        assert!(orbital_decomposition(&e).unwrap().is_empty());
    }

    #[test]
    fn fixed_component_rows() {
        let f2 = Arc::new(Fan::hirzebruch(2));
        let e = SplitBundle::from_i64(&f2, &[&[0, 1, 0, 1]]).unwrap();
        let t = orbital_decomposition(&e).unwrap();
        let rows: Vec<(Vec<usize>, Cone)> = t.entries.iter().map(|r| (r.subset.clone(), r.tau.clone())).collect();
        assert_eq!(rows, vec![(vec![0], Cone::zero()), (vec![], Cone::ray(1))]);
        assert_eq!(t.candidates, 2 * 9);

        // the negative section alone: only the fixed row survives
        let e = SplitBundle::from_i64(&f2, &[&[0, 1, 0, 0]]).unwrap();
        let t = orbital_decomposition(&e).unwrap();
        let rows: Vec<(Vec<usize>, Cone)> = t.entries.iter().map(|r| (r.subset.clone(), r.tau.clone())).collect();
        assert_eq!(rows, vec![(vec![], Cone::ray(1))]);
    }

    #[test]
    fn intersection_numbers() {
        let q = Arc::new(Fan::product_of_lines(2));
        let e = SplitBundle::from_i64(&q, &[&[0, 2, 0, 0]]).unwrap();
        assert_eq!(intersection_number(&e, &Cone::ray(2)).unwrap(), b(2));
        assert_eq!(intersection_number(&e, &Cone::ray(3)).unwrap(), b(2));
        assert_eq!(intersection_number(&e, &Cone::ray(0)).unwrap(), b(0));
        assert!(intersection_number(&e, &Cone::zero()).is_err());
        assert!(is_degenerate_class(&e, &CycleClass::orbit(1, Cone::ray(0))).unwrap());
        assert!(!is_degenerate_class(&e, &CycleClass::orbit(1, Cone::ray(2))).unwrap());
        assert!(is_degenerate_class(&e, &CycleClass::zero(1)).unwrap());

        let c = Arc::new(Fan::product_of_lines(3));
        let e = SplitBundle::from_i64(&c, &[&[0, 1, 0, 1, 0, 0], &[0, 0, 0, 1, 0, 1]]).unwrap();
        for (_, v) in positivity_table(&e).unwrap() {
            assert_eq!(v, b(1));
        }
    }

    #[test]
    fn cycle_intersection_on_p2() {
        let p2 = Arc::new(Fan::projective_plane());
        for d in 1..4 {
            let e = SplitBundle::from_i64(&p2, &[&[0, 0, d]]).unwrap();
            let line = CycleClass::orbit(1, Cone::ray(0));
            assert_eq!(cycle_intersection(&e, &line).unwrap(), b(d));
            let two = line.add(&CycleClass::orbit(1, Cone::ray(2)));
            assert_eq!(cycle_intersection(&e, &two).unwrap(), b(2 * d));
        }
        let e = SplitBundle::from_i64(&p2, &[&[0, 0, 1]]).unwrap();
        assert!(cycle_intersection(&e, &CycleClass::orbit(0, Cone::new(vec![0, 1]))).is_err());
    }

    #[test]
    fn multidegrees() {
        let p2 = Arc::new(Fan::projective_plane());
        let line = CycleClass::orbit(1, Cone::ray(0));
        let e = SplitBundle::from_i64(&p2, &[&[0, 0, 1], &[0, 0, 2]]).unwrap();
        assert_eq!(resultant_multidegree(&e, &line).unwrap(), vec![b(2), b(1)]);
        let e = SplitBundle::from_i64(&p2, &[&[0, 0, 1], &[0, 0, 1]]).unwrap();
        assert_eq!(resultant_multidegree(&e, &line).unwrap(), vec![b(1), b(1)]);
        assert_eq!(
            resultant_multidegree(&e, &CycleClass::zero(1)).unwrap(),
            vec![b(0), b(0)]
        );
    }

    #[test]
    fn shapes_and_dual_codim() {
        let c = Arc::new(Fan::product_of_lines(3));
        let e = SplitBundle::from_i64(&c, &[&[0, 2, 0, 0, 0, 0]]).unwrap();
        assert_eq!(parameter_space_shape(&e), vec![2]);
        let p2 = Arc::new(Fan::projective_plane());
        let e = SplitBundle::from_i64(&p2, &[&[0, 0, 1], &[0, 0, 1]]).unwrap();
        assert_eq!(parameter_space_shape(&e), vec![2, 2]);
        assert_eq!(dual_codim(0, 2), 2);
        assert_eq!(dual_codim(2, 2), 0);
        assert_eq!(dual_codim(1, 2), 1);
    }

    #[test]
    fn positivity_against_the_sufficient_conditions() {
        // the product example: (a)–(c) hold but the first factor's rays see 0
        let c = Arc::new(Fan::product_of_lines(3));
        let e = SplitBundle::from_i64(&c, &[&[0, 1, 0, 0, 0, 0], &[0, 0, 0, 1, 0, 1]]).unwrap();
        assert!(e.is_very_ample_bundle().unwrap());
        let zeros: Vec<Cone> = positivity_table(&e)
            .unwrap()
            .into_iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(t, _)| t)
            .collect();
        assert_eq!(zeros, vec![Cone::ray(0), Cone::ray(1)]);

        // pullback of the hyperplane class to F_1: big and nef, not ample
        let f1 = Arc::new(Fan::hirzebruch(1));
        let e = SplitBundle::from_i64(&f1, &[&[0, 0, 0, 1], &[0, 0, 0, 1]]).unwrap();
        assert!(satisfies_positivity(&e).unwrap());
        assert!(!e.is_very_ample_bundle().unwrap());
    }
}
