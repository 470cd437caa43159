//! Brute-force exact convex hulls for the small point sets that come out of
//! lattice polytopes (dimension at most 4, a few dozen points).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::lattice::{self, IVec, QVec};

#[derive(Debug, Clone)]
pub(crate) struct Facet {
    /// Primitive inward normal.
    pub normal: IVec,
    pub offset: BigInt,
    /// Indices of the input points lying on the facet.
    pub points: Vec<usize>,
}

fn sub(a: &[BigInt], b: &[BigInt]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Normal to the hyperplane through `d` points of `Z^d`; zero if they are
/// affinely dependent.
fn cross_normal(pts: &[&IVec]) -> IVec {
    let d = pts[0].len();
    let rows: Vec<IVec> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
    (0..d)
        .map(|j| {
            let minor: Vec<IVec> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = lattice::det_int(&minor);
            if j % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(m: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(m, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, r, 0, &mut cur, &mut out);
    out
}

/// Facets of the hull of a full-dimensional set of distinct points in `Z^d`.
pub(crate) fn facets(pts: &[IVec]) -> Vec<Facet> {
    let d = pts[0].len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for combo in combinations(pts.len(), d) {
        let chosen: Vec<&IVec> = combo.iter().map(|&i| &pts[i]).collect();
        let mut normal = cross_normal(&chosen);
        if normal.iter().all(|x| x.is_zero()) {
            continue;
        }
        let g = lattice::gcd_all(&normal);
        for x in normal.iter_mut() {
            *x = &*x / &g;
        }
        let offset = lattice::dot(&normal, chosen[0]);
        let mut pos = false;
        let mut neg = false;
        let mut on = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let v = lattice::dot(&normal, p) - &offset;
            if v.is_positive() {
                pos = true;
            } else if v.is_negative() {
                neg = true;
            } else {
                on.push(i);
            }
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        let (normal, offset) = if neg {
            (normal.into_iter().map(|x| -x).collect::<IVec>(), -offset)
        } else {
            (normal, offset)
        };
        if seen.insert(normal.clone()) {
            out.push(Facet {
                normal,
                offset,
                points: on,
            });
        }
    }
    out
}

/// Indices of the vertices of a full-dimensional point set, given its facets.
pub(crate) fn vertices_from_facets(pts: &[IVec], facets: &[Facet]) -> Vec<usize> {
    let d = pts[0].len();
    (0..pts.len())
        .filter(|&i| {
            let normals: Vec<IVec> = facets
                .iter()
                .filter(|f| f.points.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            lattice::rank_int(&normals) == d
        })
        .collect()
}

/// Coordinates that project the affine hull of `pts` injectively, plus its
/// dimension. `pts` must be nonempty.
pub(crate) fn affine_frame(pts: &[QVec]) -> (usize, Vec<usize>) {
    let dirs: Vec<QVec> = pts[1..].iter().map(|p| lattice::sub_q(p, &pts[0])).collect();
    let mut m = dirs;
    let piv = lattice::rref(&mut m);
    (piv.len(), piv)
}

/// Scales rational points to integers with a common denominator.
pub(crate) fn scale_to_integers(pts: &[QVec]) -> (Vec<IVec>, BigInt) {
    use num_integer::Integer;
    let l = pts.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints = pts
        .iter()
        .map(|p| p.iter().map(|x| (x * &l).to_integer()).collect())
        .collect();
    (ints, l)
}

pub(crate) fn project(p: &[BigInt], coords: &[usize]) -> IVec {
    coords.iter().map(|&c| p[c].clone()).collect()
}

/// Pulling triangulation of a full-dimensional set of distinct vertices in
/// `Z^d`; each simplex is returned as `d + 1` point indices.
pub(crate) fn triangulate(pts: &[IVec]) -> Vec<Vec<usize>> {
    let d = pts[0].len();
    if d == 0 || pts.len() == 1 {
        return vec![vec![0]];
    }
    // the lexicographic minimum is always a vertex
    let apex = (0..pts.len()).min_by(|&a, &b| pts[a].cmp(&pts[b])).unwrap();
    let mut out = Vec::new();
    for f in facets(pts) {
        if f.points.contains(&apex) {
            continue;
        }
        let sub_pts: Vec<IVec> = f.points.iter().map(|&i| pts[i].clone()).collect();
        let qs: Vec<QVec> = sub_pts.iter().map(|p| lattice::to_q(p)).collect();
        let (dim, coords) = affine_frame(&qs);
        debug_assert_eq!(dim, d - 1);
        let projected: Vec<IVec> = sub_pts.iter().map(|p| project(p, &coords)).collect();
        for simplex in triangulate(&projected) {
            let mut s: Vec<usize> = simplex.iter().map(|&j| f.points[j]).collect();
            s.push(apex);
            out.push(s);
        }
    }
    out
}

/// `d! · vol` of the hull of a full-dimensional set of distinct points in `Z^d`.
pub(crate) fn normalized_volume_full(pts: &[IVec]) -> BigInt {
    let d = pts[0].len();
    if d == 0 {
        return BigInt::one();
    }
    let fs = facets(pts);
    let verts: Vec<IVec> = vertices_from_facets(pts, &fs)
        .into_iter()
        .map(|i| pts[i].clone())
        .collect();
    triangulate(&verts)
        .iter()
        .map(|s| {
            let rows: Vec<IVec> = s[..d].iter().map(|&i| sub(&verts[i], &verts[s[d]])).collect();
            lattice::det_int(&rows).abs()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;

    #[test]
    fn square_with_interior_point() {
        let pts = vec![
            ivec(&[0, 0]),
            ivec(&[2, 0]),
            ivec(&[0, 2]),
            ivec(&[2, 2]),
            ivec(&[1, 1]),
            ivec(&[1, 0]),
        ];
        let fs = facets(&pts);
        assert_eq!(fs.len(), 4);
        let v = vertices_from_facets(&pts, &fs);
        assert_eq!(v, vec![0, 1, 2, 3]);
        assert_eq!(normalized_volume_full(&pts), BigInt::from(8));
    }

    #[test]
    fn cube_and_cross_polytope() {
        let mut cube = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    cube.push(ivec(&[x, y, z]));
                }
            }
        }
        assert_eq!(facets(&cube).len(), 6);
        assert_eq!(normalized_volume_full(&cube), BigInt::from(6));
        let oct = vec![
            ivec(&[1, 0, 0]),
            ivec(&[-1, 0, 0]),
            ivec(&[0, 1, 0]),
            ivec(&[0, -1, 0]),
            ivec(&[0, 0, 1]),
            ivec(&[0, 0, -1]),
        ];
        assert_eq!(facets(&oct).len(), 8);
        // Euclidean volume 4/3, times 3! = 8
        assert_eq!(normalized_volume_full(&oct), BigInt::from(8));
    }

    #[test]
    fn segment() {
        let pts = vec![ivec(&[3]), ivec(&[-1]), ivec(&[0])];
        assert_eq!(normalized_volume_full(&pts), BigInt::from(4));
    }
}
