//! T-divisors, line bundles with their chart data, and split bundles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{ChartFrame, Cone, Fan};
use crate::lattice::{self, IVec};
use crate::numeric::{CPoly, C64};
use crate::polytope::{self, Halfspace, Polytope};

/// `D = Σ k_ρ D_ρ`, one coefficient per ray of the fan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TDivisor {
    pub k: Vec<BigInt>,
}

impl TDivisor {
    pub fn new(k: Vec<BigInt>) -> Self {
        TDivisor { k }
    }

    pub fn from_i64(k: &[i64]) -> Self {
        TDivisor { k: lattice::ivec(k) }
    }

    pub fn zero(rays: usize) -> Self {
        TDivisor {
            k: vec![BigInt::zero(); rays],
        }
    }

    pub fn is_effective(&self) -> bool {
        self.k.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            k: self.k.iter().zip(&other.k).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            k: self.k.iter().zip(&other.k).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `P_D = {m : ⟨m, η_ρ⟩ ≥ −k_ρ for every ray ρ}`.
pub fn polytope_from_divisor(fan: &Fan, d: &TDivisor) -> Result<Polytope> {
    if d.k.len() != fan.rays().len() {
        return Err(Error::Malformed(format!(
            "divisor has {} coefficients but the fan has {} rays",
            d.k.len(),
            fan.rays().len()
        )));
    }
    let hs = fan
        .rays()
        .iter()
        .zip(&d.k)
        .map(|(r, k)| Halfspace::new(r.eta.clone(), k.clone()))
        .collect();
    Ok(Polytope::from_inequalities(fan.dim(), hs, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceMode {
    /// `P^τ`: cut by `⟨m,η_ρ⟩ = −k′_ρ`, the mobile coefficients.
    Mobile,
    /// `P^(τ)`: lattice points on `⟨m,η_ρ⟩ = −k_ρ`, the raw coefficients.
    Virtual,
}

#[derive(Debug, Clone)]
pub struct ChartData {
    pub frame: ChartFrame,
    /// `s_{σ,D}`.
    pub s: IVec,
    /// `Δ_{D,σ} = φ_σ(P_D − s_{σ,D})`.
    pub delta: Polytope,
}

#[derive(Debug, Clone)]
pub struct LineBundle {
    fan: Arc<Fan>,
    divisor: TDivisor,
    polytope: Polytope,
    mobile: Option<(TDivisor, Polytope)>,
    charts: Vec<ChartData>,
}

impl LineBundle {
    pub fn new(fan: Arc<Fan>, divisor: TDivisor) -> Result<LineBundle> {
        let polytope = polytope_from_divisor(&fan, &divisor)?;
        let mobile = if polytope.lattice_points().is_empty() {
            None
        } else {
            let kp = mobile_coefficients(&fan, &polytope);
            let mp = polytope_from_divisor(&fan, &kp)?;
            Some((kp, mp))
        };
        let mut charts = Vec::with_capacity(fan.max_cones().len());
        for sigma in fan.max_cones() {
            let frame = fan.chart_frame(sigma)?;
            let mut s = vec![BigInt::zero(); fan.dim()];
            for (m, &r) in frame.dual_basis.iter().zip(&sigma.ray_ids) {
                for (si, mi) in s.iter_mut().zip(m) {
                    *si -= &divisor.k[r] * mi;
                }
            }
            let delta = if polytope.is_empty() {
                Polytope::empty(fan.dim())
            } else {
                let neg: Vec<_> = lattice::to_q(&s).into_iter().map(|x| -x).collect();
                polytope.translate(&neg).linear_image(&frame.phi_sigma)
            };
            charts.push(ChartData { frame, s, delta });
        }
        Ok(LineBundle {
            fan,
            divisor,
            polytope,
            mobile,
            charts,
        })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn divisor(&self) -> &TDivisor {
        &self.divisor
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    /// `l(D)`, the number of lattice points of `P_D`.
    pub fn sections(&self) -> usize {
        self.polytope.lattice_points().len()
    }

    pub fn charts(&self) -> &[ChartData] {
        &self.charts
    }

    pub fn chart(&self, sigma: &Cone) -> Result<&ChartData> {
        self.fan
            .max_cone_index(sigma)
            .map(|i| &self.charts[i])
            .ok_or_else(|| Error::Dimension(format!("{sigma} is not a maximal cone")))
    }

    pub fn local_vertex(&self, sigma: &Cone) -> Result<&IVec> {
        Ok(&self.chart(sigma)?.s)
    }

    /// `(D′, D″)` with `D′` the mobile part.
    pub fn mobile_fixed_split(&self) -> Result<(TDivisor, TDivisor)> {
        let (kp, _) = self
            .mobile
            .as_ref()
            .ok_or_else(|| Error::NoSections("the divisor polytope has no lattice points".into()))?;
        Ok((kp.clone(), self.divisor.sub(kp)))
    }

    pub fn is_globally_generated(&self) -> bool {
        !self.polytope.is_empty() && self.charts.iter().all(|c| self.polytope.contains(&c.s))
    }

    fn check_cone(&self, tau: &Cone) -> Result<()> {
        if self.fan.contains_cone(tau) {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{tau} is not a cone of the fan")))
        }
    }

    pub fn face(&self, tau: &Cone, mode: FaceMode) -> Result<Polytope> {
        self.check_cone(tau)?;
        let n = self.fan.dim();
        match mode {
            FaceMode::Mobile => {
                let Some((kp, mp)) = &self.mobile else {
                    return Ok(Polytope::empty(n));
                };
                let eqs: Vec<Halfspace> = tau
                    .ray_ids
                    .iter()
                    .map(|&r| Halfspace::new(self.fan.ray(r).clone(), kp.k[r].clone()))
                    .collect();
                Ok(mp.slice(&eqs))
            }
            FaceMode::Virtual => {
                let pts: Vec<IVec> = self
                    .polytope
                    .lattice_points()
                    .iter()
                    .filter(|m| {
                        tau.ray_ids
                            .iter()
                            .all(|&r| lattice::dot(m, self.fan.ray(r)) == -&self.divisor.k[r])
                    })
                    .cloned()
                    .collect();
                Ok(Polytope::from_int_points(n, &pts))
            }
        }
    }

    /// Cones τ whose orbit closure lies in the base locus.
    pub fn base_locus_cones(&self) -> Vec<Cone> {
        self.fan
            .all_cones()
            .filter(|tau| self.face(tau, FaceMode::Virtual).map(|p| p.is_empty()).unwrap_or(false))
            .cloned()
            .collect()
    }

    /// Exponent `φ_σ(m − s_{σ,D})` of the character `m` in the chart of σ.
    pub fn chart_exponent(&self, m: &[BigInt], sigma: &Cone) -> Result<IVec> {
        let ch = self.chart(sigma)?;
        let diff: IVec = m.iter().zip(&ch.s).map(|(a, b)| a - b).collect();
        Ok(ch.frame.apply(&diff))
    }

    /// The section written in the affine coordinates of `U_σ`.
    pub fn chart_polynomial(&self, a: &Section, sigma: &Cone) -> Result<CPoly> {
        let n = self.fan.dim();
        let mut p = CPoly::zero(n);
        for (m, c) in &a.coeffs {
            if !self.polytope.contains(m) {
                return Err(Error::Malformed(format!(
                    "support point {} lies outside the polytope",
                    crate::fan::fmt_ivec(m)
                )));
            }
            let e = self.chart_exponent(m, sigma)?;
            let e: Vec<u32> = e
                .iter()
                .map(|x| x.to_u32().expect("exponents of points of P are nonnegative"))
                .collect();
            p.add_term(e, *c);
        }
        Ok(p)
    }
}

fn mobile_coefficients(fan: &Fan, p: &Polytope) -> TDivisor {
    TDivisor {
        k: fan
            .rays()
            .iter()
            .map(|r| {
                -p.lattice_points()
                    .iter()
                    .map(|m| lattice::dot(m, &r.eta))
                    .min()
                    .expect("nonempty lattice point set")
            })
            .collect(),
    }
}

/// Coefficients of a global section in the character basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub coeffs: BTreeMap<IVec, C64>,
}

impl Section {
    pub fn new(coeffs: BTreeMap<IVec, C64>) -> Self {
        Section { coeffs }
    }

    /// Independent coefficients drawn uniformly from the unit disc on every
    /// lattice point of the polytope.
    pub fn random<R: Rng + ?Sized>(l: &LineBundle, rng: &mut R) -> Section {
        Section {
            coeffs: l
                .polytope()
                .lattice_points()
                .iter()
                .map(|m| (m.clone(), random_unit_disc(rng)))
                .collect(),
        }
    }

    pub fn coeff(&self, m: &[BigInt]) -> C64 {
        self.coeffs.get(m).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm() == 0.0)
    }
}

pub fn random_unit_disc<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r: f64 = rng.random::<f64>().sqrt();
    let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, t)
}

pub fn random_unit_circle<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// `E = L_1 ⊕ … ⊕ L_k` on one fan.
#[derive(Debug, Clone)]
pub struct SplitBundle {
    fan: Arc<Fan>,
    line_bundles: Vec<LineBundle>,
}

impl SplitBundle {
    pub fn new(fan: Arc<Fan>, divisors: Vec<TDivisor>) -> Result<SplitBundle> {
        if divisors.is_empty() {
            return Err(Error::Malformed("a split bundle needs at least one line bundle".into()));
        }
        if divisors.len() > fan.dim() {
            return Err(Error::Dimension(format!(
                "rank {} exceeds the dimension {}",
                divisors.len(),
                fan.dim()
            )));
        }
        let line_bundles = divisors
            .into_iter()
            .map(|d| LineBundle::new(fan.clone(), d))
            .collect::<Result<_>>()?;
        Ok(SplitBundle { fan, line_bundles })
    }

    pub fn from_i64(fan: &Arc<Fan>, ks: &[&[i64]]) -> Result<SplitBundle> {
        SplitBundle::new(fan.clone(), ks.iter().map(|k| TDivisor::from_i64(k)).collect())
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.line_bundles.len()
    }

    pub fn line_bundles(&self) -> &[LineBundle] {
        &self.line_bundles
    }

    pub fn polytopes(&self) -> Vec<Polytope> {
        self.line_bundles.iter().map(|l| l.polytope().clone()).collect()
    }

    pub fn total_divisor(&self) -> TDivisor {
        self.line_bundles
            .iter()
            .skip(1)
            .fold(self.line_bundles[0].divisor().clone(), |acc, l| acc.add(l.divisor()))
    }

    pub fn is_globally_generated(&self) -> bool {
        self.line_bundles.iter().all(|l| l.is_globally_generated())
    }

    pub fn is_essential(&self) -> bool {
        polytope::is_essential(&self.polytopes())
    }

    /// Global generation, essentiality, and on every chart the translated
    /// polytope of `ΣD_i` containing the dual basis.
    pub fn is_very_ample_bundle(&self) -> Result<bool> {
        if !self.is_globally_generated() || !self.is_essential() {
            return Ok(false);
        }
        let total = LineBundle::new(self.fan.clone(), self.total_divisor())?;
        Ok(total.charts().iter().all(|ch| {
            ch.frame.dual_basis.iter().all(|m| {
                let p: IVec = ch.s.iter().zip(m).map(|(a, b)| a + b).collect();
                total.polytope().contains(&p)
            })
        }))
    }

    /// Every `Δ_{i,σ}` contains the elementary simplex.
    pub fn satisfies_condition_star(&self, sigma: &Cone) -> Result<bool> {
        for l in &self.line_bundles {
            let ch = l.chart(sigma)?;
            if !l.polytope().contains(&ch.s) {
                return Ok(false);
            }
            for m in &ch.frame.dual_basis {
                let p: IVec = ch.s.iter().zip(m).map(|(a, b)| a + b).collect();
                if !l.polytope().contains(&p) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn random_sections<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Section> {
        self.line_bundles.iter().map(|l| Section::random(l, rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::projective_plane())
    }

    fn line(fan: &Arc<Fan>, k: &[i64]) -> LineBundle {
        LineBundle::new(fan.clone(), TDivisor::from_i64(k)).unwrap()
    }

    #[test]
    fn divisor_polytopes_of_p2() {
        let f = p2();
        assert_eq!(line(&f, &[1, 1, 1]).sections(), 10);
        assert_eq!(line(&f, &[0, 0, 1]).sections(), 3);
        assert!(line(&f, &[0, 0, -1]).polytope().is_empty());
        for d in 0..=4i64 {
            assert_eq!(line(&f, &[0, 0, d]).sections() as i64, (d + 1) * (d + 2) / 2);
        }
    }

    #[test]
    fn local_vertices() {
        let f = p2();
        let h = line(&f, &[0, 0, 1]);
        assert_eq!(h.local_vertex(&Cone::new(vec![0, 1])).unwrap(), &ivec(&[0, 0]));
        assert_eq!(h.local_vertex(&Cone::new(vec![1, 2])).unwrap(), &ivec(&[1, 0]));
        assert_eq!(h.local_vertex(&Cone::new(vec![0, 2])).unwrap(), &ivec(&[0, 1]));
        for ch in h.charts() {
            assert_eq!(ch.delta, Polytope::simplex(2, 1));
        }
        assert!(h.is_globally_generated());
        assert!(h.base_locus_cones().is_empty());
    }

    #[test]
    fn f2_fixed_component() {
        let f = Arc::new(Fan::hirzebruch(2));
        // D = D_{(-1,2)}: P = {x ≥ 0, y ≥ 0, -x + 2y ≥ -1, -y ≥ 0} = [0,1] × {0}
        let l = line(&f, &[0, 0, 1, 0]);
        let (mob, fix) = l.mobile_fixed_split().unwrap();
        assert_eq!(mob, TDivisor::from_i64(&[0, 0, 1, 0]));
        assert!(fix.is_zero());
        assert!(l.is_globally_generated());

        // D = D_{(0,-1)}: P ∩ Z^2 = {0, (0,1), (1,1), (2,1)}
        let l = line(&f, &[0, 0, 0, 1]);
        assert_eq!(l.sections(), 4);
        let (mob, fix) = l.mobile_fixed_split().unwrap();
        assert!(fix.is_zero(), "{mob:?} {fix:?}");

        // D = D_{(0,1)}: negative section of F_2; P = {0}, fixed part = D
        let l = line(&f, &[0, 1, 0, 0]);
        assert_eq!(l.sections(), 1);
        let (mob, fix) = l.mobile_fixed_split().unwrap();
        assert!(mob.is_zero());
        assert_eq!(fix, TDivisor::from_i64(&[0, 1, 0, 0]));
        assert!(!l.is_globally_generated());
        let bl = l.base_locus_cones();
        assert!(bl.contains(&Cone::ray(1)));
        assert!(!bl.contains(&Cone::zero()));
        let mobile = line(&f, &[0, 0, 0, 0]);
        assert!(mobile.is_globally_generated());
    }

    #[test]
    fn empty_polytope_base_locus_is_everything() {
        let f = p2();
        let l = line(&f, &[0, 0, -1]);
        assert!(!l.is_globally_generated());
        assert_eq!(l.base_locus_cones().len(), f.all_cones().count());
        assert!(matches!(l.mobile_fixed_split(), Err(Error::NoSections(_))));
    }

    #[test]
    fn faces() {
        let f = p2();
        let h = line(&f, &[0, 0, 1]);
        let tau = Cone::ray(0);
        let face = Polytope::from_i64_points(2, &[&[0, 0], &[0, 1]]);
        assert_eq!(h.face(&tau, FaceMode::Mobile).unwrap(), face);
        assert_eq!(h.face(&tau, FaceMode::Virtual).unwrap(), face);

        let q = Arc::new(Fan::product_of_lines(2));
        // k on (e1, -e1, e2, -e2) = (0, 2, 0, 0): P = [0, 2] × {0}
        let l = line(&q, &[0, 2, 0, 0]);
        let pt = l.face(&Cone::ray(0), FaceMode::Mobile).unwrap();
        assert_eq!(pt, Polytope::from_i64_points(2, &[&[0, 0]]));
        assert!(l.face(&Cone::new(vec![0, 5]), FaceMode::Mobile).is_err());

        // on F_2 the plane ⟨m,(0,1)⟩ = −1 misses P = {0}, so k > k′ there
        let f2 = Arc::new(Fan::hirzebruch(2));
        let l = line(&f2, &[0, 1, 0, 0]);
        assert!(l.face(&Cone::ray(1), FaceMode::Virtual).unwrap().is_empty());
        assert!(!l.face(&Cone::ray(1), FaceMode::Mobile).unwrap().is_empty());
    }

    #[test]
    fn condition_star_and_very_ample() {
        let q = Arc::new(Fan::product_of_lines(2));
        let e10 = SplitBundle::from_i64(&q, &[&[0, 1, 0, 0]]).unwrap();
        let e11 = SplitBundle::from_i64(&q, &[&[0, 1, 0, 1]]).unwrap();
        for s in q.max_cones() {
            assert!(!e10.satisfies_condition_star(s).unwrap());
            assert!(e11.satisfies_condition_star(s).unwrap());
        }
        let e20 = SplitBundle::from_i64(&q, &[&[0, 2, 0, 0]]).unwrap();
        assert!(e20.is_essential());
        assert!(!e20.is_very_ample_bundle().unwrap());

        let f = p2();
        let hh = SplitBundle::from_i64(&f, &[&[0, 0, 1], &[0, 0, 1]]).unwrap();
        assert!(hh.is_very_ample_bundle().unwrap());
        let c = Arc::new(Fan::product_of_lines(3));
        let e = SplitBundle::from_i64(&c, &[&[0, 1, 0, 1, 0, 0], &[0, 0, 0, 1, 0, 1]]).unwrap();
        assert!(e.is_very_ample_bundle().unwrap());
    }

    #[test]
    fn chart_polynomials() {
        let f = p2();
        let h = line(&f, &[0, 0, 1]);
        // x + y + 1 in the identity chart
        let a = Section::new(
            [(ivec(&[0, 0]), 1.0), (ivec(&[1, 0]), 1.0), (ivec(&[0, 1]), 1.0)]
                .into_iter()
                .map(|(m, c)| (m, C64::new(c, 0.0)))
                .collect(),
        );
        let p0 = h.chart_polynomial(&a, &Cone::new(vec![0, 1])).unwrap();
        assert_eq!(p0.terms.len(), 3);
        assert_eq!(p0.coeff(&[1, 0]), C64::new(1.0, 0.0));
        let p1 = h.chart_polynomial(&a, &Cone::new(vec![1, 2])).unwrap();
        assert_eq!(p1.total_degree(), 1);
        assert_eq!(p1.terms.len(), 3);
        let bad = Section::new([(ivec(&[2, 0]), C64::new(1.0, 0.0))].into_iter().collect());
        assert!(h.chart_polynomial(&bad, &Cone::new(vec![0, 1])).is_err());
    }
}
