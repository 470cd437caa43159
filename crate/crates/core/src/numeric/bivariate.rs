//! Square bivariate systems by Sylvester-resultant elimination.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::poly::{CPoly, CPoly1, C64};
use super::roots::univariate_roots;
use crate::error::{Error, Result};

/// Run-scoped numeric tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative backward error accepted for a root.
    pub tol: f64,
    /// Relative distance under which two roots count as one cluster.
    pub cluster: f64,
    /// `|J| / (|∇f| |∇g|)` below this flags a near-singular point.
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: 1e-10,
            cluster: 1e-7,
            singular: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PointFlags {
    pub singular: bool,
    pub multiple: bool,
    pub ambiguous: bool,
}

impl PointFlags {
    pub fn any(&self) -> bool {
        self.singular || self.multiple || self.ambiguous
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolutionSet {
    pub points: Vec<Vec<C64>>,
    /// Max over the equations of the relative backward error.
    pub residuals: Vec<f64>,
    pub jacobians: Vec<C64>,
    pub flags: Vec<PointFlags>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn all_transversal(&self) -> bool {
        self.flags.iter().all(|f| !f.any())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Jacobian determinant of a square system at `x`.
pub fn jacobian_det(system: &[CPoly], x: &[C64]) -> C64 {
    let n = system.len();
    let m = DMatrix::from_fn(n, n, |i, j| system[i].partial(j).eval(x));
    m.determinant()
}

fn gradient_norm(p: &CPoly, x: &[C64]) -> f64 {
    (0..p.nvars)
        .map(|j| p.partial(j).eval(x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Transversality measure `|J| / Π |∇f_i|`, in `[0, 1]`.
pub fn transversality(system: &[CPoly], x: &[C64]) -> f64 {
    let denom: f64 = system.iter().map(|p| gradient_norm(p, x)).product();
    if denom == 0.0 {
        return 0.0;
    }
    jacobian_det(system, x).norm() / denom
}

fn sylvester(fc: &[C64], gc: &[C64]) -> DMatrix<C64> {
    // fc, gc ascending coefficient lists in the eliminated variable
    let p = fc.len() - 1;
    let q = gc.len() - 1;
    let size = p + q;
    let mut m = DMatrix::from_element(size, size, C64::new(0.0, 0.0));
    for r in 0..q {
        for (i, c) in fc.iter().rev().enumerate() {
            m[(r, r + i)] = *c;
        }
    }
    for r in 0..p {
        for (i, c) in gc.iter().rev().enumerate() {
            m[(q + r, r + i)] = *c;
        }
    }
    m
}

fn specialize_coeffs(coeffs: &[CPoly], keep: usize, t: C64) -> Vec<C64> {
    let mut x = [C64::new(0.0, 0.0); 2];
    x[keep] = t;
    coeffs.iter().map(|c| c.eval(&x)).collect()
}

/// Upper bound on the degree of the resultant.
fn resultant_degree_bound(f: &CPoly, g: &CPoly) -> usize {
    let bideg = f.degree_in(1) * g.degree_in(0) + f.degree_in(0) * g.degree_in(1);
    let total = f.total_degree() * g.total_degree();
    bideg.min(total) as usize
}

/// Resultant of `f` and `g` with respect to variable `elim`, as a univariate
/// polynomial in the other variable, via evaluation at roots of unity.
pub fn resultant(f: &CPoly, g: &CPoly, elim: usize) -> Result<CPoly1> {
    let keep = 1 - elim;
    let fc = f.coefficients_in(elim);
    let gc = g.coefficients_in(elim);
    if fc.len() == 1 && gc.len() == 1 {
        return Err(Error::PositiveDimensional(
            "neither equation involves the eliminated variable".into(),
        ));
    }
    let bound = resultant_degree_bound(f, g);
    let l = bound + 1;
    let mut values = Vec::with_capacity(l);
    let mut hadamard: f64 = 0.0;
    for k in 0..l {
        let t = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / l as f64);
        let s = sylvester(&specialize_coeffs(&fc, keep, t), &specialize_coeffs(&gc, keep, t));
        let h: f64 = s
            .row_iter()
            .map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .product();
        hadamard = hadamard.max(h);
        values.push(if s.nrows() == 0 {
            C64::new(1.0, 0.0)
        } else {
            s.determinant()
        });
    }
    let coeffs: Vec<C64> = (0..l)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, v) in values.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (j * k) as f64 / l as f64;
                acc += v * C64::from_polar(1.0, ang);
            }
            acc / l as f64
        })
        .collect();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max <= 1e-11 * hadamard.max(f64::MIN_POSITIVE) {
        return Err(Error::PositiveDimensional("the resultant vanishes identically".into()));
    }
    let mut coeffs = coeffs;
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-11 * max {
        coeffs.pop();
    }
    Ok(CPoly1::new(coeffs))
}

fn newton_refine(f: &CPoly, g: &CPoly, p: &mut [C64; 2]) {
    let start = *p;
    let best = affine_newton(f, g, p);
    // solutions close to a coordinate axis with the other coordinate large
    // sit near the toric boundary, where Newton in log coordinates behaves
    if best > 1e-13 && start.iter().all(|z| z.norm() > 0.0) {
        let mut q = start;
        if log_newton(f, g, &mut q) < best {
            *p = q;
        }
    }
}

fn affine_newton(f: &CPoly, g: &CPoly, p: &mut [C64; 2]) -> f64 {
    let sys = [f.clone(), g.clone()];
    let (fx, fy, gx, gy) = (f.partial(0), f.partial(1), g.partial(0), g.partial(1));
    let mut best = residual(&sys, p);
    for _ in 0..8 {
        let (a, b, c, d) = (fx.eval(p), fy.eval(p), gx.eval(p), gy.eval(p));
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            break;
        }
        let (u, v) = (f.eval(p), g.eval(p));
        let dx = (d * u - b * v) / det;
        let dy = (a * v - c * u) / det;
        let cand = [p[0] - dx, p[1] - dy];
        let r = residual(&sys, &cand);
        if r.is_nan() || r >= best {
            break;
        }
        *p = cand;
        best = r;
        if (dx.norm() + dy.norm()) <= 1e-16 * (p[0].norm() + p[1].norm()).max(1.0) {
            break;
        }
    }
    best
}

/// Damped Newton in `x_i = exp(s_i)` on the equations scaled by their
/// absolute values. The line search uses the scaling frozen at the current
/// point: the relative residual itself plateaus near 1 far from a root.
fn log_newton(f: &CPoly, g: &CPoly, p: &mut [C64; 2]) -> f64 {
    let sys = [f.clone(), g.clone()];
    let (fx, fy, gx, gy) = (f.partial(0), f.partial(1), g.partial(0), g.partial(1));
    for _ in 0..80 {
        let (sf, sg) = (f.eval_abs(p), g.eval_abs(p));
        if sf == 0.0 || sg == 0.0 {
            break;
        }
        let merit = |q: &[C64; 2]| (f.eval(q) / sf).norm_sqr() + (g.eval(q) / sg).norm_sqr();
        let a = fx.eval(p) * p[0] / sf;
        let b = fy.eval(p) * p[1] / sf;
        let c = gx.eval(p) * p[0] / sg;
        let d = gy.eval(p) * p[1] / sg;
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            break;
        }
        let (u, v) = (f.eval(p) / sf, g.eval(p) / sg);
        let ds = [(d * u - b * v) / det, (a * v - c * u) / det];
        let here = merit(p);
        let mut step = 1.0;
        let mut moved = false;
        while step >= 1.0 / 1024.0 {
            let cand = [p[0] * (-ds[0] * step).exp(), p[1] * (-ds[1] * step).exp()];
            let m = merit(&cand);
            if !m.is_nan() && m < here {
                *p = cand;
                moved = true;
                break;
            }
            step /= 2.0;
        }
        if !moved || ds[0].norm() + ds[1].norm() <= 1e-15 {
            break;
        }
    }
    residual(&sys, p)
}

fn residual(sys: &[CPoly], p: &[C64]) -> f64 {
    sys.iter().map(|q| q.relative_residual(p)).fold(0.0, f64::max)
}

/// Eliminate the variable with the smaller Sylvester matrix; ties → x1.
fn elimination_variable(f: &CPoly, g: &CPoly) -> usize {
    let size = |v: usize| f.degree_in(v) + g.degree_in(v);
    let elim = if size(1) < size(0) { 1 } else { 0 };
    if size(elim) == 0 {
        1 - elim
    } else {
        elim
    }
}

fn leading_coefficient(p: &CPoly, elim: usize) -> CPoly1 {
    let keep = 1 - elim;
    let lc = p.coefficients_in(elim).pop().unwrap_or_else(|| CPoly::zero(2));
    let mut c = vec![C64::new(0.0, 0.0); lc.degree_in(keep) as usize + 1];
    for (e, z) in &lc.terms {
        c[e[keep] as usize] += z;
    }
    CPoly1::new(c)
}

/// Whether the leading coefficients in the eliminated variable can vanish
/// together. The resultant then also vanishes above common roots at
/// infinity, which carry no affine solution. The test is deliberately loose:
/// a false positive only costs the detour through generic coordinates.
fn shared_leading_root(f: &CPoly, g: &CPoly, elim: usize, tols: &Tolerances) -> bool {
    let (lf, lg) = (leading_coefficient(f, elim), leading_coefficient(g, elim));
    if lf.degree().unwrap_or(0) == 0 || lg.degree().unwrap_or(0) == 0 {
        return false;
    }
    if lf.coeffs[0].norm() == 0.0 && lg.coeffs[0].norm() == 0.0 {
        return true;
    }
    let Ok(roots) = univariate_roots(&lf, tols.tol, tols.cluster) else {
        return true;
    };
    let d = lg.degree().unwrap_or(0) as i32;
    roots
        .iter()
        .any(|r| lg.eval(r.z).norm() <= 1e-6 * lg.abs_sum() * r.z.norm().max(1.0).powi(d))
}

/// All isolated solutions of `f = g = 0` in `C^2`.
pub fn solve_bivariate(f: &CPoly, g: &CPoly, tols: &Tolerances) -> Result<SolutionSet> {
    if f.nvars != 2 || g.nvars != 2 {
        return Err(Error::Dimension(
            "solve_bivariate needs two polynomials in two variables".into(),
        ));
    }
    if f.is_zero() || g.is_zero() {
        return Err(Error::PositiveDimensional("an equation is identically zero".into()));
    }
    let elim = elimination_variable(f, g);
    if !shared_leading_root(f, g, elim, tols) {
        return solve_eliminating(f, g, elim, tols);
    }
    // x = A·(u, v) with a fixed generic A: the leading coefficients become
    // nonzero constants, so every resultant root lies below a solution
    let a = [
        [C64::new(1.0, 0.0), C64::new(0.31, 0.47)],
        [C64::new(-0.53, 0.29), C64::new(1.0, 0.0)],
    ];
    let sub: Vec<CPoly> = a
        .iter()
        .map(|row| CPoly::from_terms(2, [(vec![1, 0], row[0]), (vec![0, 1], row[1])]))
        .collect();
    let (fu, gu) = (f.compose(&sub), g.compose(&sub));
    let inner = solve_eliminating(&fu, &gu, elimination_variable(&fu, &gu), tols)?;
    let sys = [f.clone(), g.clone()];
    let mut out = SolutionSet::default();
    for (uv, flags) in inner.points.iter().zip(&inner.flags) {
        let mut p = [a[0][0] * uv[0] + a[0][1] * uv[1], a[1][0] * uv[0] + a[1][1] * uv[1]];
        newton_refine(f, g, &mut p);
        out.residuals.push(residual(&sys, &p));
        out.jacobians.push(jacobian_det(&sys, &p));
        out.flags.push(PointFlags {
            singular: transversality(&sys, &p) < tols.singular,
            ..*flags
        });
        out.points.push(p.to_vec());
    }
    check_residuals(&out, tols)?;
    Ok(out)
}

fn check_residuals(out: &SolutionSet, tols: &Tolerances) -> Result<()> {
    for (i, r) in out.residuals.iter().enumerate() {
        if *r > tols.tol && !out.flags[i].any() {
            return Err(Error::Numeric(format!(
                "solution {i} has relative residual {r:.3e} above {:.1e}",
                tols.tol
            )));
        }
    }
    Ok(())
}

fn solve_eliminating(f: &CPoly, g: &CPoly, elim: usize, tols: &Tolerances) -> Result<SolutionSet> {
    let keep = 1 - elim;
    let res = resultant(f, g, elim)?;
    if res.degree() == Some(0) {
        return Ok(SolutionSet::default());
    }
    let troots = univariate_roots(&res, tols.tol, tols.cluster)?;
    let sys = [f.clone(), g.clone()];
    let mut out = SolutionSet::default();
    // group clustered resultant roots; a cluster of size m may hide m
    // distinct solutions sharing this coordinate
    let mut used = vec![false; troots.len()];
    for i in 0..troots.len() {
        if used[i] {
            continue;
        }
        let thr = tols.cluster * troots[i].z.norm().max(1.0);
        let group: Vec<usize> = (i..troots.len())
            .filter(|&j| !used[j] && (troots[j].z - troots[i].z).norm() <= thr.max(tols.cluster * troots[j].z.norm()))
            .take(troots[i].multiplicity)
            .collect();
        for &j in &group {
            used[j] = true;
        }
        let m = group.len();
        let t = group.iter().map(|&j| troots[j].z).sum::<C64>() / m as f64;
        let mut x = [C64::new(0.0, 0.0); 2];
        x[keep] = t;
        let mut cands = Vec::new();
        // both leading coefficients vanish: the resultant also picks up
        // common roots at infinity, which have no affine candidate
        let mut drops = 0;
        for p in [f, g] {
            // a coefficient is dropped when it vanishes relative to its own
            // scale at t, not to the others: those grow like powers of |t|
            let scales: Vec<f64> = p.coefficients_in(elim).iter().map(|q| q.eval_abs(&x)).collect();
            let mut c = p.specialize(elim, &x).coeffs;
            while c.len() > 1 && c.last().unwrap().norm() <= 1e-10 * scales[c.len() - 1] {
                c.pop();
            }
            if c.len() <= p.degree_in(elim) as usize {
                drops += 1;
            }
            if c.len() < 2 {
                continue;
            }
            match univariate_roots(&CPoly1::new(c), tols.tol, tols.cluster) {
                Ok(rs) => cands.extend(rs.into_iter().map(|r| r.z)),
                Err(e) => log::debug!("back-substitution at {t}: {e}"),
            }
        }
        let at_infinity = drops == 2;
        let mut scored: Vec<(f64, C64)> = cands
            .iter()
            .map(|&y| {
                let mut p = x;
                p[elim] = y;
                (residual(&sys, &p), y)
            })
            .filter(|&(r, _)| !at_infinity || r <= tols.tol)
            .collect();
        if scored.is_empty() {
            if at_infinity {
                log::debug!("resultant root {t} lies at infinity");
                continue;
            }
            return Err(Error::Numeric(format!(
                "no back-substitution candidates at resultant root {t}"
            )));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        // distinct candidates, best first
        let mut distinct: Vec<(f64, C64)> = Vec::new();
        for &(r, y) in &scored {
            if distinct
                .iter()
                .all(|&(_, z)| (z - y).norm() > tols.cluster * z.norm().max(1.0))
            {
                distinct.push((r, y));
            }
        }
        let m = if at_infinity { m.min(distinct.len()) } else { m };
        let best_r = distinct[0].0;
        let plausible = |r: f64| r <= (1e3 * best_r).max(1e-9);
        let take = distinct.iter().filter(|d| plausible(d.0)).count().min(m).max(1);
        let ambiguous = distinct.iter().filter(|d| plausible(d.0)).count() > m;
        for k in 0..m {
            let (_, y) = distinct[k.min(take - 1)];
            let mut p = x;
            p[elim] = y;
            newton_refine(f, g, &mut p);
            let jac = jacobian_det(&sys, &p);
            let flags = PointFlags {
                singular: transversality(&sys, &p) < tols.singular,
                multiple: k >= take,
                ambiguous,
            };
            out.points.push(p.to_vec());
            out.residuals.push(residual(&sys, &p));
            out.jacobians.push(jac);
            out.flags.push(flags);
        }
    }
    // points that landed in the same cluster are multiple
    for i in 0..out.points.len() {
        for j in i + 1..out.points.len() {
            let d: f64 = (0..2).map(|k| (out.points[i][k] - out.points[j][k]).norm()).sum();
            let s = out.points[i].iter().map(|z| z.norm()).fold(1.0, f64::max);
            if d <= tols.cluster * s {
                out.flags[i].multiple = true;
                out.flags[j].multiple = true;
            }
        }
    }
    check_residuals(&out, tols)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_pair() {
        let f = CPoly::from_real(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[0, 0], -1.0)]);
        let g = CPoly::from_real(2, &[(&[1, 0], 1.0), (&[0, 1], -1.0)]);
        let s = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.points[0][0] - C64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((s.points[0][1] - C64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((s.jacobians[0] - C64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn conic_and_line() {
        // x^2 + y^2 - 4 = 0, y = 1 ⇒ x = ±√3
        let f = CPoly::from_real(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -4.0)]);
        let g = CPoly::from_real(2, &[(&[0, 1], 1.0), (&[0, 0], -1.0)]);
        let s = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        assert_eq!(s.len(), 2);
        let mut xs: Vec<f64> = s.points.iter().map(|p| p[0].re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 3f64.sqrt()).abs() < 1e-12);
        assert!((xs[1] - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn common_factor_is_positive_dimensional() {
        // f = x·(y - 1), g = x·(y + 2)
        let f = CPoly::from_real(2, &[(&[1, 1], 1.0), (&[1, 0], -1.0)]);
        let g = CPoly::from_real(2, &[(&[1, 1], 1.0), (&[1, 0], 2.0)]);
        let err = solve_bivariate(&f, &g, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::PositiveDimensional(_)));
    }

    #[test]
    fn tangency_is_flagged() {
        // parabola y = x^2 touching y = 0
        let f = CPoly::from_real(2, &[(&[0, 1], 1.0), (&[2, 0], -1.0)]);
        let g = CPoly::from_real(2, &[(&[0, 1], 1.0)]);
        let s = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s.all_transversal());
    }

    // Both leading coefficients in x2 are monomials in x1, so the resultant
    // has a multiple root at x1 = 0 with nothing above it.
    #[test]
    fn shared_leading_roots_add_no_solutions() {
        let f = CPoly::from_real(2, &[(&[0, 0], 0.7), (&[1, 1], -1.3)]);
        let g = CPoly::from_real(2, &[(&[0, 0], 0.4), (&[1, 2], 0.9)]);
        let sols = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        assert_eq!(sols.len(), 1);
        let f = CPoly::from_real(2, &[(&[0, 0], 0.5), (&[1, 1], -0.8), (&[2, 2], 0.3), (&[3, 3], 1.1)]);
        let g = CPoly::from_real(2, &[(&[0, 0], 0.2), (&[1, 0], -0.7), (&[2, 0], 0.6), (&[1, 1], 1.0)]);
        let sols = solve_bivariate(&f, &g, &Tolerances::default()).unwrap();
        assert_eq!(sols.len(), 6);
        assert!(sols.max_residual() <= 1e-10);
    }
}
