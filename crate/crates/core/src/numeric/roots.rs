//! Aberth–Ehrlich simultaneous iteration for all roots of a univariate
//! polynomial.

use serde::Serialize;

use super::poly::{CPoly1, C64};
use crate::error::{Error, Result};

const MAX_ITERS: usize = 800;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub z: C64,
    /// Size of the cluster this root belongs to; 1 for a simple root.
    pub multiplicity: usize,
}

impl Root {
    pub fn is_multiple(&self) -> bool {
        self.multiplicity > 1
    }
}

/// Returns exactly `deg p` roots. Each root satisfies the backward-error
/// bound `|p(r)| ≤ tol · Σ|c| · max(1,|r|)^deg`; roots within
/// `cluster · max(1,|r|)` of each other are reported with their cluster size.
pub fn univariate_roots(p: &CPoly1, tol: f64, cluster: f64) -> Result<Vec<Root>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Malformed("zero polynomial has no roots".into()))?;
    if deg == 0 {
        return Err(Error::Malformed("constant polynomial has no roots".into()));
    }
    let coeffs = &p.coeffs[..=deg];
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = CPoly1::new(coeffs[zeros..].to_vec());
    let mut zs = vec![C64::new(0.0, 0.0); zeros];
    zs.extend(aberth(&reduced)?);

    let scale = coeffs.iter().map(|c| c.norm()).sum::<f64>();
    for z in &zs {
        let bound = tol * scale * z.norm().max(1.0).powi(deg as i32);
        let val = p.eval(*z).norm();
        if val.is_nan() || val > bound {
            return Err(Error::Numeric(format!(
                "root {z} of a degree-{deg} polynomial has backward error {:.3e} (bound {:.3e})",
                val, bound
            )));
        }
    }
    Ok(with_clusters(zs, cluster))
}

fn with_clusters(zs: Vec<C64>, cluster: f64) -> Vec<Root> {
    let n = zs.len();
    // union-find over the "close" relation
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let thr = cluster * zs[i].norm().max(zs[j].norm()).max(1.0);
            if (zs[i] - zs[j]).norm() <= thr {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    (0..n)
        .map(|i| Root {
            z: zs[i],
            multiplicity: roots.iter().filter(|&&r| r == roots[i]).count(),
        })
        .collect()
}

fn aberth(p: &CPoly1) -> Result<Vec<C64>> {
    let deg = p.coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p.coeffs[deg];
    if deg == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    // starting radius from the geometric mean of the root moduli
    let r0 = (p.coeffs[0].norm() / lead.norm()).powf(1.0 / deg as f64);
    let r0 = if r0.is_finite() && r0 > 0.0 { r0 } else { 1.0 };
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            C64::from_polar(r0, theta)
        })
        .collect();
    let mut done = vec![false; deg];
    for _ in 0..MAX_ITERS {
        let mut all_done = true;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let s: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                // derivative vanished; nudge and keep going
                let bump = C64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += bump;
                all_done = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1.0) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("root iteration diverged".into()));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic() {
        let mut r = univariate_roots(&CPoly1::from_real(&[-1.0, 0.0, 1.0]), 1e-10, 1e-7).unwrap();
        r.sort_by(|a, b| a.z.re.partial_cmp(&b.z.re).unwrap());
        assert!((r[0].z - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1].z - c(1.0, 0.0)).norm() < 1e-14);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn triple_zero() {
        let r = univariate_roots(&CPoly1::from_real(&[0.0, 0.0, 0.0, 1.0]), 1e-10, 1e-7).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.z.norm() == 0.0 && x.multiplicity == 3));
    }

    #[test]
    fn known_factors() {
        let truth = [
            c(0.3, -1.2),
            c(-2.0, 0.5),
            c(1.5, 1.5),
            c(0.0, 0.7),
            c(-0.4, -0.4),
            c(3.0, 0.0),
        ];
        let p = CPoly1::from_roots(&truth);
        let r = univariate_roots(&p, 1e-10, 1e-7).unwrap();
        assert_eq!(r.len(), 6);
        for t in &truth {
            let best = r.iter().map(|x| (x.z - t).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "{t}: {best}");
        }
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(univariate_roots(&CPoly1::from_real(&[0.0, 0.0]), 1e-10, 1e-7).is_err());
        assert!(univariate_roots(&CPoly1::from_real(&[2.0]), 1e-10, 1e-7).is_err());
    }

    #[test]
    fn double_root_is_clustered() {
        let p = CPoly1::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]);
        let r = univariate_roots(&p, 1e-10, 1e-7).unwrap();
        let doubles = r.iter().filter(|x| x.multiplicity == 2).count();
        assert_eq!(doubles, 2);
    }
}
