//! Exact rational polytopes: vertex/half-space descriptions, lattice points,
//! Minkowski sums, essential families and lattice-normalized mixed volumes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull;
use crate::lattice::{self, IVec, QVec};

/// `⟨m, eta⟩ ≥ −c` (or `= −c` when used as an equality).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub eta: IVec,
    pub c: BigRational,
}

impl Halfspace {
    pub fn new(eta: IVec, c: BigInt) -> Self {
        Halfspace {
            eta,
            c: BigRational::from_integer(c),
        }
    }

    fn slack_q(&self, m: &[BigRational]) -> BigRational {
        lattice::dot_qi(m, &self.eta) + &self.c
    }

    fn slack_i(&self, m: &[BigInt]) -> BigRational {
        BigRational::from_integer(lattice::dot(m, &self.eta)) + &self.c
    }
}

/// A polytope in `R^n` kept in both descriptions.
#[derive(Debug, Clone)]
pub struct Polytope {
    n: usize,
    halfspaces: Vec<Halfspace>,
    equalities: Vec<Halfspace>,
    vertices: Vec<QVec>,
    lattice_pts: Vec<IVec>,
}

pub type HPolytope = Polytope;

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

#[derive(Debug, Clone, Serialize)]
pub struct PolytopeSummary {
    pub dim: i64,
    pub vertices: Vec<Vec<String>>,
    pub lattice_points: usize,
}

impl Polytope {
    /// `{m : ⟨m,η⟩ ≥ −c for each half-space, ⟨m,η⟩ = −c for each equality}`.
    /// The inequalities must cut out a bounded set.
    pub fn from_inequalities(n: usize, halfspaces: Vec<Halfspace>, equalities: Vec<Halfspace>) -> Self {
        let vertices = enumerate_vertices(n, &halfspaces, &equalities);
        let mut p = Polytope {
            n,
            halfspaces,
            equalities,
            vertices,
            lattice_pts: Vec::new(),
        };
        p.lattice_pts = p.scan_lattice_points();
        p
    }

    /// Convex hull of finitely many rational points.
    pub fn from_points(n: usize, pts: &[QVec]) -> Self {
        let uniq: Vec<QVec> = pts.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if uniq.is_empty() {
            return Polytope::empty(n);
        }
        let (d, coords) = hull::affine_frame(&uniq);
        let mut equalities = Vec::new();
        let dirs: Vec<QVec> = uniq[1..].iter().map(|p| lattice::sub_q(p, &uniq[0])).collect();
        let perp = if dirs.is_empty() {
            (0..n)
                .map(|i| {
                    let mut e = vec![BigRational::zero(); n];
                    e[i] = BigRational::one();
                    e
                })
                .collect()
        } else {
            lattice::nullspace_q(&dirs, n)
        };
        for v in perp {
            let eta = lattice::primitive_integer(&v);
            let c = -lattice::dot_qi(&uniq[0], &eta);
            equalities.push(Halfspace { eta, c });
        }
        let mut halfspaces = Vec::new();
        let vertices = if d == 0 {
            vec![uniq[0].clone()]
        } else {
            let proj: Vec<QVec> = uniq
                .iter()
                .map(|p| coords.iter().map(|&c| p[c].clone()).collect())
                .collect();
            let (ints, scale) = hull::scale_to_integers(&proj);
            let fs = hull::facets(&ints);
            for f in &fs {
                // ⟨p_J, a⟩ ≥ offset / scale, lifted by zero padding
                let mut eta = vec![BigInt::zero(); n];
                for (j, &c) in coords.iter().enumerate() {
                    eta[c] = f.normal[j].clone();
                }
                halfspaces.push(Halfspace {
                    eta,
                    c: -BigRational::new(f.offset.clone(), scale.clone()),
                });
            }
            hull::vertices_from_facets(&ints, &fs)
                .into_iter()
                .map(|i| uniq[i].clone())
                .collect()
        };
        let mut p = Polytope {
            n,
            halfspaces,
            equalities,
            vertices,
            lattice_pts: Vec::new(),
        };
        p.lattice_pts = p.scan_lattice_points();
        p
    }

    pub fn from_int_points(n: usize, pts: &[IVec]) -> Self {
        let q: Vec<QVec> = pts.iter().map(|p| lattice::to_q(p)).collect();
        Polytope::from_points(n, &q)
    }

    pub fn from_i64_points(n: usize, pts: &[&[i64]]) -> Self {
        let q: Vec<IVec> = pts.iter().map(|p| lattice::ivec(p)).collect();
        Polytope::from_int_points(n, &q)
    }

    pub fn empty(n: usize) -> Self {
        Polytope {
            n,
            halfspaces: Vec::new(),
            equalities: vec![Halfspace {
                eta: vec![BigInt::zero(); n],
                c: BigRational::one(),
            }],
            vertices: Vec::new(),
            lattice_pts: Vec::new(),
        }
    }

    /// The elementary simplex `conv{0, e_1, …, e_n}` scaled by `d`.
    pub fn simplex(n: usize, d: i64) -> Self {
        let mut pts = vec![vec![0i64; n]];
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = d;
            pts.push(e);
        }
        let pts: Vec<IVec> = pts.iter().map(|p| lattice::ivec(p)).collect();
        Polytope::from_int_points(n, &pts)
    }

    /// The cube `[0, d]^n`.
    pub fn cube(n: usize, d: i64) -> Self {
        let pts: Vec<IVec> = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| BigInt::from(if mask >> i & 1 == 1 { d } else { 0 }))
                    .collect()
            })
            .collect();
        Polytope::from_int_points(n, &pts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    /// Vertices, sorted lexicographically.
    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    /// Lattice points, sorted lexicographically; this order is the
    /// coordinate order for section coefficients.
    pub fn lattice_points(&self) -> &[IVec] {
        &self.lattice_pts
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull; −1 when empty.
    pub fn dimension(&self) -> i64 {
        if self.vertices.is_empty() {
            return -1;
        }
        hull::affine_frame(&self.vertices).0 as i64
    }

    pub fn contains_q(&self, m: &[BigRational]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack_q(m).is_negative())
            && self.equalities.iter().all(|h| h.slack_q(m).is_zero())
    }

    pub fn contains(&self, m: &[BigInt]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack_i(m).is_negative())
            && self.equalities.iter().all(|h| h.slack_i(m).is_zero())
    }

    /// The intersection with the hyperplanes `⟨m,η⟩ = −c`.
    pub fn slice(&self, extra: &[Halfspace]) -> Polytope {
        let mut eqs = self.equalities.clone();
        eqs.extend(extra.iter().cloned());
        Polytope::from_inequalities(self.n, self.halfspaces.clone(), eqs)
    }

    /// The face minimizing `⟨m, eta⟩`, with that minimum.
    pub fn face_minimizing(&self, eta: &[BigInt]) -> Option<(Polytope, BigRational)> {
        let min = self.vertices.iter().map(|v| lattice::dot_qi(v, eta)).min()?;
        let pts: Vec<QVec> = self
            .vertices
            .iter()
            .filter(|v| lattice::dot_qi(v, eta) == min)
            .cloned()
            .collect();
        Some((Polytope::from_points(self.n, &pts), min))
    }

    /// Translate by `−s`.
    pub fn translate(&self, s: &[BigRational]) -> Polytope {
        let pts: Vec<QVec> = self.vertices.iter().map(|v| lattice::add_q(v, s)).collect();
        Polytope::from_points(self.n, &pts)
    }

    /// Image under an integer matrix (rows = output coordinates).
    pub fn linear_image(&self, rows: &[IVec]) -> Polytope {
        let pts: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| rows.iter().map(|r| lattice::dot_qi(v, r)).collect())
            .collect();
        Polytope::from_points(rows.len(), &pts)
    }

    pub fn summary(&self) -> PolytopeSummary {
        PolytopeSummary {
            dim: self.dimension(),
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(lattice::format_q).collect())
                .collect(),
            lattice_points: self.lattice_pts.len(),
        }
    }

    fn scan_lattice_points(&self) -> Vec<IVec> {
        if self.vertices.is_empty() {
            return Vec::new();
        }
        let lo: Vec<BigInt> = (0..self.n)
            .map(|i| lattice::ceil_q(self.vertices.iter().map(|v| &v[i]).min().unwrap()))
            .collect();
        let hi: Vec<BigInt> = (0..self.n)
            .map(|i| lattice::floor_q(self.vertices.iter().map(|v| &v[i]).max().unwrap()))
            .collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            // odometer increment, last coordinate fastest
            let mut i = self.n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    cur[i + 1..].clone_from_slice(&lo[i + 1..]);
                    break;
                }
            }
        }
    }
}

fn enumerate_vertices(n: usize, hs: &[Halfspace], eqs: &[Halfspace]) -> Vec<QVec> {
    let eq_rows: Vec<QVec> = eqs.iter().map(|h| lattice::to_q(&h.eta)).collect();
    let r = lattice::rank_q(&eq_rows);
    // a zero equality row with nonzero offset means the set is empty
    if eqs.iter().any(|h| h.eta.iter().all(|x| x.is_zero()) && !h.c.is_zero()) {
        return Vec::new();
    }
    let need = n - r;
    let mut found = BTreeSet::new();
    let combos = if need == 0 {
        vec![Vec::new()]
    } else {
        subsets(hs.len(), need)
    };
    for combo in combos {
        let mut rows: Vec<QVec> = Vec::new();
        for h in eqs.iter().chain(combo.iter().map(|&i| &hs[i])) {
            let mut row = lattice::to_q(&h.eta);
            row.push(-h.c.clone());
            rows.push(row);
        }
        let piv = lattice::rref(&mut rows);
        if piv.contains(&n) || piv.len() != n {
            continue;
        }
        let x: QVec = rows[..n].iter().map(|row| row[n].clone()).collect();
        let ok = hs.iter().all(|h| !h.slack_q(&x).is_negative()) && eqs.iter().all(|h| h.slack_q(&x).is_zero());
        if ok {
            found.insert(x);
        }
    }
    found.into_iter().collect()
}

fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(m: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, r, 0, &mut Vec::new(), &mut out);
    out
}

/// An ordered family of polytopes in a common ambient space.
#[derive(Debug, Clone)]
pub struct PolytopeFamily {
    pub members: Vec<Polytope>,
}

impl PolytopeFamily {
    pub fn new(members: Vec<Polytope>) -> Result<Self> {
        if let Some(first) = members.first() {
            if members.iter().any(|p| p.n != first.n) {
                return Err(Error::Dimension("family members live in different spaces".into()));
            }
        }
        Ok(PolytopeFamily { members })
    }

    pub fn is_essential(&self) -> bool {
        is_essential(&self.members)
    }

    pub fn mixed_volume(&self) -> Result<BigRational> {
        mixed_volume(&self.members, self.members.len())
    }
}

pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    if p.n != q.n {
        return Err(Error::Dimension(format!(
            "Minkowski sum of polytopes in R^{} and R^{}",
            p.n, q.n
        )));
    }
    if p.is_empty() || q.is_empty() {
        return Err(Error::Malformed("Minkowski sum with an empty polytope".into()));
    }
    let pts: Vec<QVec> = p
        .vertices
        .iter()
        .flat_map(|v| q.vertices.iter().map(move |w| lattice::add_q(v, w)))
        .collect();
    Ok(Polytope::from_points(p.n, &pts))
}

fn directions(p: &Polytope) -> Vec<QVec> {
    p.vertices[1..]
        .iter()
        .map(|v| lattice::sub_q(v, &p.vertices[0]))
        .collect()
}

/// Dimension of `Σ_{i∈I} P_i` without forming the sum.
fn sum_dimension(members: &[&Polytope]) -> usize {
    let dirs: Vec<QVec> = members.iter().flat_map(|p| directions(p)).collect();
    lattice::rank_q(&dirs)
}

/// Every subfamily's Minkowski sum has dimension at least its size. A family
/// containing an empty polytope is not essential.
pub fn is_essential(members: &[Polytope]) -> bool {
    if members.iter().any(|p| p.is_empty()) {
        return false;
    }
    let k = members.len();
    (1u64..(1u64 << k)).into_par_iter().all(|mask| {
        let sub: Vec<&Polytope> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &members[i]).collect();
        sum_dimension(&sub) >= sub.len()
    })
}

/// Coordinates of `p − base` in the lattice basis `frame` (columns).
fn frame_coords(p: &[BigRational], base: &[BigRational], frame: &[IVec]) -> QVec {
    let n = p.len();
    let d = frame.len();
    let diff = lattice::sub_q(p, base);
    let mut rows: Vec<QVec> = (0..n)
        .map(|i| {
            let mut r: QVec = frame.iter().map(|b| BigRational::from_integer(b[i].clone())).collect();
            r.push(diff[i].clone());
            r
        })
        .collect();
    lattice::rref(&mut rows);
    rows[..d].iter().map(|r| r[d].clone()).collect()
}

/// `d!·vol` of a `d`-dimensional point set measured in the lattice `frame`.
fn lattice_volume(pts: &[QVec], frame: &[IVec]) -> BigRational {
    let d = frame.len();
    if d == 0 {
        return BigRational::one();
    }
    let coords: Vec<QVec> = pts.iter().map(|p| frame_coords(p, &pts[0], frame)).collect();
    let (ints, scale) = hull::scale_to_integers(&coords);
    let vol = hull::normalized_volume_full(&ints);
    BigRational::new(vol, num_traits::pow(scale, d))
}

/// `k!` times the `k`-volume of `P` measured in the lattice of its affine
/// span; zero when `dim P < k`.
pub fn normalized_volume(p: &Polytope, k: usize) -> Result<BigRational> {
    if k > p.n {
        return Err(Error::Dimension(format!("volume of dimension {k} in R^{}", p.n)));
    }
    let d = p.dimension();
    if d < k as i64 {
        return Ok(BigRational::zero());
    }
    if d > k as i64 {
        return Err(Error::Dimension(format!("polytope has dimension {d}, larger than {k}")));
    }
    let frame = lattice::saturated_lattice_basis(&directions(p), p.n);
    Ok(lattice_volume(&p.vertices, &frame))
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Mixed volume of `k` polytopes whose Minkowski sum has dimension at most
/// `k`, normalized so that `MV(Δ,…,Δ) = 1`. Volumes are measured in the
/// lattice of the span of the sum, so the family may sit in any
/// `k`-dimensional rational subspace of `R^n`.
pub fn mixed_volume(members: &[Polytope], k: usize) -> Result<BigRational> {
    if members.len() != k {
        return Err(Error::Dimension(format!(
            "mixed volume of order {k} needs {k} polytopes, got {}",
            members.len()
        )));
    }
    if k == 0 {
        return Ok(BigRational::one());
    }
    let n = members[0].n;
    if members.iter().any(|p| p.n != n) {
        return Err(Error::Dimension("family members live in different spaces".into()));
    }
    if k > n {
        return Err(Error::Dimension(format!("mixed volume of order {k} in R^{n}")));
    }
    if members.iter().any(|p| p.is_empty()) {
        return Ok(BigRational::zero());
    }
    let all: Vec<&Polytope> = members.iter().collect();
    let total = sum_dimension(&all);
    if total > k {
        return Err(Error::Dimension(format!(
            "the family spans dimension {total}; project it to a {k}-dimensional frame first"
        )));
    }
    if total < k {
        return Ok(BigRational::zero());
    }
    let dirs: Vec<QVec> = all.iter().flat_map(|p| directions(p)).collect();
    let frame = lattice::saturated_lattice_basis(&dirs, n);
    let terms: Vec<BigRational> = (1u64..(1u64 << k))
        .into_par_iter()
        .map(|mask| {
            let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<&Polytope> = idx.iter().map(|&i| &members[i]).collect();
            if sum_dimension(&sub) < k {
                return BigRational::zero();
            }
            let mut acc = sub[0].clone();
            for p in &sub[1..] {
                acc = minkowski_sum(&acc, p).expect("nonempty operands");
            }
            let v = lattice_volume(&acc.vertices, &frame);
            if (k - idx.len()).is_odd() {
                -v
            } else {
                v
            }
        })
        .collect();
    let sum = terms.into_iter().fold(BigRational::zero(), |a, b| a + b);
    Ok(sum / BigRational::from_integer(factorial(k)))
}
