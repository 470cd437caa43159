//! Complete regular fans and their affine-chart frames.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, IVec};

/// Primitive generator of a one-dimensional cone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray {
    pub eta: IVec,
}

/// A simplicial cone, stored as the sorted set of its ray indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone {
    pub ray_ids: Vec<usize>,
}

impl Cone {
    pub fn new(mut ray_ids: Vec<usize>) -> Self {
        ray_ids.sort_unstable();
        ray_ids.dedup();
        Cone { ray_ids }
    }

    pub fn zero() -> Self {
        Cone { ray_ids: Vec::new() }
    }

    pub fn ray(i: usize) -> Self {
        Cone { ray_ids: vec![i] }
    }

    pub fn dim(&self) -> usize {
        self.ray_ids.len()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.ray_ids.iter().all(|r| other.ray_ids.contains(r))
    }

    /// All faces with exactly `r` rays.
    pub fn faces_of_dim(&self, r: usize) -> Vec<Cone> {
        let mut out = Vec::new();
        subsets(&self.ray_ids, r, &mut Vec::new(), 0, &mut out);
        out
    }

    /// Proper faces, including the zero cone.
    pub fn proper_faces(&self) -> Vec<Cone> {
        (0..self.dim()).flat_map(|r| self.faces_of_dim(r)).collect()
    }
}

fn subsets(ids: &[usize], r: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Cone>) {
    if cur.len() == r {
        out.push(Cone { ray_ids: cur.clone() });
        return;
    }
    for i in start..ids.len() {
        cur.push(ids[i]);
        subsets(ids, r, cur, i + 1, out);
        cur.pop();
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ray_ids.is_empty() {
            return f.write_str("{0}");
        }
        let parts: Vec<String> = self.ray_ids.iter().map(|r| r.to_string()).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

/// A fan given by its maximal cones. Lower cones are derived and cached at
/// construction; the value is immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    n: usize,
    rays: Vec<Ray>,
    max_cones: Vec<Cone>,
    cones_by_dim: Vec<Vec<Cone>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub smooth: bool,
    pub complete: bool,
    pub failures: Vec<String>,
}

/// Affine coordinates of the chart `U_σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartFrame {
    pub sigma: Cone,
    /// `m_i(σ)`, dual to the rays of σ in `ray_ids` order.
    pub dual_basis: Vec<IVec>,
    /// Integer matrix sending `m_i(σ)` to `e_i`; its rows are the rays of σ.
    pub phi_sigma: Vec<IVec>,
}

impl ChartFrame {
    /// Applies `φ_σ` to an integer vector.
    pub fn apply(&self, v: &[BigInt]) -> IVec {
        self.phi_sigma.iter().map(|row| lattice::dot(row, v)).collect()
    }
}

impl Fan {
    /// Builds a fan, rejecting structurally malformed input. Smoothness and
    /// completeness are checked separately by [`validate_fan`].
    pub fn new(n: usize, rays: Vec<IVec>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if n == 0 {
            return Err(Error::Malformed("ambient dimension must be positive".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Malformed(format!(
                    "ray {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(Error::Malformed(format!("ray {i} is zero")));
            }
            if !lattice::is_primitive(r) {
                return Err(Error::Malformed(format!("ray {i} = {} is not primitive", fmt_ivec(r))));
            }
        }
        let mut seen_rays = BTreeSet::new();
        for (i, r) in rays.iter().enumerate() {
            if !seen_rays.insert(r.clone()) {
                return Err(Error::Malformed(format!("ray {i} is repeated")));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        let mut seen = BTreeSet::new();
        for (ci, ids) in max_cones.into_iter().enumerate() {
            if let Some(bad) = ids.iter().find(|&&r| r >= rays.len()) {
                return Err(Error::Malformed(format!(
                    "cone {ci} references ray {bad}, but only {} rays exist",
                    rays.len()
                )));
            }
            let len = ids.len();
            let cone = Cone::new(ids);
            if cone.dim() != len {
                return Err(Error::Malformed(format!("cone {ci} repeats a ray")));
            }
            if cone.dim() != n {
                return Err(Error::Malformed(format!(
                    "cone {ci} has {} rays; maximal cones of a simplicial fan in dimension {n} need {n}",
                    cone.dim()
                )));
            }
            if !seen.insert(cone.clone()) {
                return Err(Error::Malformed(format!("cone {ci} is a duplicate")));
            }
            cones.push(cone);
        }
        if cones.is_empty() {
            return Err(Error::Malformed("fan has no maximal cones".into()));
        }
        let cones_by_dim: Vec<Vec<Cone>> = (0..=n)
            .map(|r| {
                let set: BTreeSet<Cone> = cones.iter().flat_map(|c| c.faces_of_dim(r)).collect();
                set.into_iter().collect()
            })
            .collect();
        Ok(Fan {
            n,
            rays: rays.into_iter().map(|eta| Ray { eta }).collect(),
            max_cones: cones,
            cones_by_dim,
        })
    }

    pub fn from_i64(n: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan> {
        Fan::new(
            n,
            rays.iter().map(|r| lattice::ivec(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn projective_plane() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]]).expect("P2 fan")
    }

    /// `(P^1)^d` with rays ordered `e_1, -e_1, e_2, -e_2, ...`.
    pub fn product_of_lines(d: usize) -> Fan {
        let mut rays = Vec::new();
        for i in 0..d {
            for s in [1i64, -1] {
                let mut v = vec![0i64; d];
                v[i] = s;
                rays.push(lattice::ivec(&v));
            }
        }
        let mut cones = Vec::new();
        for mask in 0..(1usize << d) {
            cones.push((0..d).map(|i| 2 * i + ((mask >> i) & 1)).collect());
        }
        Fan::new(d, rays, cones).expect("product fan")
    }

    /// Hirzebruch surface `F_a` with rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
        )
        .expect("Hirzebruch fan")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &IVec {
        &self.rays[i].eta
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        c.dim() <= self.n && self.cones_by_dim[c.dim()].binary_search(c).is_ok()
    }

    /// All cones with exactly `r` rays; `r = 0` gives the zero cone.
    pub fn cones_of_dim(&self, r: usize) -> Result<&[Cone]> {
        self.cones_by_dim
            .get(r)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Dimension(format!("cone dimension {r} exceeds n = {}", self.n)))
    }

    pub fn all_cones(&self) -> impl Iterator<Item = &Cone> {
        self.cones_by_dim.iter().flatten()
    }

    pub fn max_cone_index(&self, c: &Cone) -> Option<usize> {
        self.max_cones.iter().position(|m| m == c)
    }

    /// A maximal cone containing `tau`.
    pub fn max_cone_containing(&self, tau: &Cone) -> Option<&Cone> {
        self.max_cones.iter().find(|m| tau.is_face_of(m))
    }

    fn ray_matrix(&self, c: &Cone) -> Vec<IVec> {
        c.ray_ids.iter().map(|&r| self.rays[r].eta.clone()).collect()
    }

    /// The canonical affine frame of the chart of a maximal cone.
    pub fn chart_frame(&self, sigma: &Cone) -> Result<ChartFrame> {
        if sigma.dim() != self.n || !self.contains_cone(sigma) {
            return Err(Error::Dimension(format!("{sigma} is not a maximal cone of this fan")));
        }
        let rmat = self.ray_matrix(sigma);
        let det = lattice::det_int(&rmat);
        if !det.abs().is_one() {
            return Err(Error::NotSmooth(format!("cone {sigma} has determinant {det}")));
        }
        // dual basis = rows of (R^T)^{-1}; with R having the rays as rows,
        // ⟨m_i, η_j⟩ = δ_ij  ⇔  M Rᵀ = I.
        let rt: Vec<_> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| num_rational::BigRational::from_integer(rmat[j][i].clone()))
                    .collect()
            })
            .collect();
        let inv = lattice::inverse_q(&rt).expect("unimodular matrix is invertible");
        let dual_basis = inv
            .iter()
            .map(|row| row.iter().map(|x| x.to_integer()).collect())
            .collect();
        Ok(ChartFrame {
            sigma: sigma.clone(),
            dual_basis,
            phi_sigma: rmat,
        })
    }
}

/// Checks the standing hypotheses (smooth, complete) on a fan.
///
/// Completeness uses facet pairing: each `(n-1)`-cone lies in exactly two
/// maximal cones, the two opposite rays of each such pair lie strictly on
/// different sides of the shared facet, and the facet-adjacency graph of
/// maximal cones is connected.
pub fn validate_fan(fan: &Fan) -> ValidationReport {
    let n = fan.n;
    let mut failures = Vec::new();
    let mut smooth = true;
    for c in &fan.max_cones {
        let det = lattice::det_int(&fan.ray_matrix(c));
        if !det.abs().is_one() {
            smooth = false;
            failures.push(format!("cone {c} is not unimodular (det = {det})"));
        }
    }

    let mut complete = true;
    let mut facet_owners: BTreeMap<Cone, Vec<usize>> = BTreeMap::new();
    for (i, c) in fan.max_cones.iter().enumerate() {
        for f in c.faces_of_dim(n - 1) {
            facet_owners.entry(f).or_default().push(i);
        }
    }
    let mut adj = vec![Vec::new(); fan.max_cones.len()];
    for (f, owners) in &facet_owners {
        if owners.len() != 2 {
            complete = false;
            failures.push(format!(
                "facet {f} lies in {} maximal cone(s), expected 2",
                owners.len()
            ));
            continue;
        }
        let (a, b) = (owners[0], owners[1]);
        adj[a].push(b);
        adj[b].push(a);
        if n >= 2 && !opposite_sides(fan, f, &fan.max_cones[a], &fan.max_cones[b]) {
            complete = false;
            failures.push(format!(
                "maximal cones {} and {} overlap across facet {f}",
                fan.max_cones[a], fan.max_cones[b]
            ));
        }
        if n == 1 {
            // the zero cone is the common facet; the rays must point opposite ways
            let ra = &fan.rays[fan.max_cones[a].ray_ids[0]].eta[0];
            let rb = &fan.rays[fan.max_cones[b].ray_ids[0]].eta[0];
            if ra.signum() == rb.signum() {
                complete = false;
                failures.push("both rays of the 1-dimensional fan point the same way".into());
            }
        }
    }
    let mut seen = vec![false; fan.max_cones.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        complete = false;
        failures.push("facet-adjacency graph of maximal cones is disconnected".into());
    }
    ValidationReport {
        smooth,
        complete,
        failures,
    }
}

fn opposite_sides(fan: &Fan, facet: &Cone, a: &Cone, b: &Cone) -> bool {
    let n = fan.n;
    let mut rows: Vec<IVec> = facet.ray_ids.iter().map(|&r| fan.rays[r].eta.clone()).collect();
    let other = |c: &Cone| {
        c.ray_ids
            .iter()
            .find(|r| !facet.ray_ids.contains(r))
            .map(|&r| fan.rays[r].eta.clone())
            .expect("maximal cone has a ray outside its facet")
    };
    rows.push(other(a));
    let da = lattice::det_int(&rows);
    rows.pop();
    rows.push(other(b));
    let db = lattice::det_int(&rows);
    debug_assert_eq!(rows.len(), n);
    da.signum() * db.signum() == -BigInt::one()
}

pub(crate) fn fmt_ivec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}
