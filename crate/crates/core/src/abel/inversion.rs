//! Recovering the curve and the form from their traces.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::family::LineFamily;
use super::fit::{fit_rational, FitConfig, RationalFit};
use super::trace::{intersection_points, TraceDataset};
use crate::bundles::random_unit_circle;
use crate::bundles::random_unit_disc;
use crate::error::{Error, Result};
use crate::numeric::{univariate_roots, CPoly, CPoly1, Tolerances, C64};

/// Singular values below `rcond · σ_max` count as zero.
pub const TRACE_RCOND: f64 = 1e-10;

fn hankel(seq: &[C64], n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |r, s| seq[r + s])
}

fn rcond(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    sv.iter().cloned().fold(f64::INFINITY, f64::min) / max
}

/// The trace matrix fit: coefficients `σ_j(a_0)` of `Y^N + Σ σ_j Y^j`, whose
/// roots are the projections `y_j`, as rational functions of `a_0`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceMatrixFit {
    pub fit: RationalFit,
    pub rational: bool,
    /// Reciprocal condition number of the Hankel matrix at each node.
    pub rcond: Vec<f64>,
    pub singular_fraction: f64,
    pub nodes_used: usize,
}

/// Solves `M σ = −(w_N, …, w_{2N−1})` with `M_{rs} = w_{r+s}` at every node
/// and fits the result. Fails with a degeneracy when more than
/// `max_singular_fraction` of the nodes have a singular `M`.
pub fn fit_trace_matrix(ds: &TraceDataset, cfg: &FitConfig, max_singular_fraction: f64) -> Result<TraceMatrixFit> {
    let n = ds.n_points;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut rconds = Vec::with_capacity(ds.nodes.len());
    for nt in &ds.nodes {
        let m = hankel(&nt.w, n);
        let rc = rcond(&m);
        rconds.push(rc);
        if rc < TRACE_RCOND {
            continue;
        }
        let rhs = DVector::from_iterator(n, nt.w[n..2 * n].iter().map(|z| -z));
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("trace matrix LU failed".into()))?;
        nodes.push(nt.a0);
        values.push(sol.iter().copied().collect::<Vec<C64>>());
    }
    let singular = rconds.iter().filter(|&&r| r < TRACE_RCOND).count();
    let frac = singular as f64 / rconds.len().max(1) as f64;
    if frac > max_singular_fraction || nodes.len() < 4 {
        return Err(Error::DegenerateForm(format!(
            "trace matrix singular on {:.0}% of {} nodes",
            100.0 * frac,
            rconds.len()
        )));
    }
    let (fit, rational) = fit_rational(&nodes, &values, cfg)?;
    Ok(TraceMatrixFit {
        fit,
        rational,
        rcond: rconds,
        singular_fraction: frac,
        nodes_used: nodes.len(),
    })
}

/// Fit of `τ_s(a_0)`, the interpolant `Σ τ_s Y^s` of `h` at the `y_j`.
#[derive(Debug, Clone, Serialize)]
pub struct FormFit {
    pub fit: RationalFit,
    pub rational: bool,
    pub nodes_used: usize,
}

/// Solves `Σ_s τ_s t_{k+s} = w_k`, `k < N`, at every node and fits the result.
pub fn fit_form(ds: &TraceDataset, cfg: &FitConfig) -> Result<FormFit> {
    let n = ds.n_points;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for nt in &ds.nodes {
        let m = hankel(&nt.t, n);
        if rcond(&m) < TRACE_RCOND {
            continue;
        }
        let rhs = DVector::from_iterator(n, nt.w[..n].iter().copied());
        if let Some(sol) = m.lu().solve(&rhs) {
            nodes.push(nt.a0);
            values.push(sol.iter().copied().collect::<Vec<C64>>());
        }
    }
    if nodes.len() < 4 {
        return Err(Error::Numeric("too few nodes with an invertible t-matrix".into()));
    }
    let (fit, rational) = fit_rational(&nodes, &values, cfg)?;
    Ok(FormFit {
        fit,
        rational,
        nodes_used: nodes.len(),
    })
}

fn horner(p: &CPoly1, x: &CPoly) -> CPoly {
    let mut acc = CPoly::zero(x.nvars);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(x).add(&CPoly::constant(x.nvars, *c));
    }
    acc
}

fn linear_form(c: [C64; 2]) -> CPoly {
    CPoly::from_terms(2, [(vec![1, 0], c[0]), (vec![0, 1], c[1])])
}

/// `Q(x) = q(l′(x)) (c·x)^N + Σ_j p_j(l′(x)) (c·x)^j` for `σ_j = p_j / q`.
/// It vanishes on the curve.
pub fn reconstruct_hypersurface(fit: &TraceMatrixFit, family: &LineFamily, ds: &TraceDataset) -> CPoly {
    let lp = family.l_prime(&ds.a);
    let y = linear_form(ds.c);
    let n = ds.n_points;
    let mut q = horner(&fit.fit.denominator_poly(), &lp).mul(&y.pow(n as u32));
    let mut ypow = CPoly::constant(2, C64::new(1.0, 0.0));
    for j in 0..n {
        q = q.add(&horner(&fit.fit.numerator(j), &lp).mul(&ypow));
        ypow = ypow.mul(&y);
    }
    let scale = q.max_abs();
    q.scale(C64::new(1.0 / scale, 0.0)).trimmed(1e-15)
}

/// `h̃ = Σ_s τ_s(l′(x)) (c·x)^s` as numerator over denominator.
#[derive(Debug, Clone, Serialize)]
pub struct RationalForm {
    pub numerator: CPoly,
    pub denominator: CPoly,
}

impl RationalForm {
    pub fn eval(&self, x: &[C64]) -> C64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }
}

pub fn reconstruct_form(fit: &FormFit, family: &LineFamily, ds: &TraceDataset) -> RationalForm {
    let lp = family.l_prime(&ds.a);
    let y = linear_form(ds.c);
    let mut num = CPoly::zero(2);
    let mut ypow = CPoly::constant(2, C64::new(1.0, 0.0));
    for s in 0..ds.n_points {
        num = num.add(&horner(&fit.fit.numerator(s), &lp).mul(&ypow));
        ypow = ypow.mul(&y);
    }
    RationalForm {
        numerator: num,
        denominator: horner(&fit.fit.denominator_poly(), &lp),
    }
}

/// Restriction of a bivariate polynomial to `t ↦ x0 + t v`.
fn restrict_to_line(q: &CPoly, x0: [C64; 2], v: [C64; 2]) -> CPoly1 {
    let sub = |i: usize| CPoly::from_terms(1, [(vec![0], x0[i]), (vec![1], v[i])]);
    let r = q.compose(&[sub(0), sub(1)]);
    let d = r.total_degree() as usize;
    let mut c = vec![C64::new(0.0, 0.0); d + 1];
    for (e, coef) in &r.terms {
        c[e[0] as usize] += coef;
    }
    let max = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().map(|z| z.norm() <= 1e-13 * max).unwrap_or(false) {
        c.pop();
    }
    CPoly1::new(c)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtractionConfig {
    /// Relative residual of the second hypersurface below which a zero of
    /// the first counts as a point of the curve.
    pub common_zero_tol: f64,
    /// Points per unknown coefficient.
    pub oversampling: usize,
    pub max_lines: usize,
    /// Points with a coordinate larger than this are discarded.
    pub radius: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            common_zero_tol: 1e-6,
            oversampling: 3,
            max_lines: 400,
            radius: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Extraction {
    pub f: CPoly,
    pub points: Vec<Vec<C64>>,
    /// Two smallest singular values of the row-normalized evaluation matrix.
    pub singular_values: [f64; 2],
}

/// Common zeros of two hypersurfaces containing the curve, found on random
/// lines, then the polynomial on `support` vanishing on them.
pub fn extract_curve<R: Rng + ?Sized>(
    q1: &CPoly,
    q2: &CPoly,
    support: &[Vec<u32>],
    cfg: &ExtractionConfig,
    rng: &mut R,
) -> Result<Extraction> {
    let want = cfg.oversampling * support.len().max(2);
    let mut points: Vec<Vec<C64>> = Vec::new();
    for _ in 0..cfg.max_lines {
        if points.len() >= want {
            break;
        }
        let x0 = [random_unit_disc(rng), random_unit_disc(rng)];
        let v = [random_unit_circle(rng), random_unit_circle(rng)];
        let r = restrict_to_line(q1, x0, v);
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let Ok(roots) = univariate_roots(&r, 1e-6, 1e-7) else {
            continue;
        };
        for root in roots {
            if root.is_multiple() {
                continue;
            }
            let p = vec![x0[0] + root.z * v[0], x0[1] + root.z * v[1]];
            if p.iter().any(|z| z.norm() > cfg.radius) {
                continue;
            }
            if q2.relative_residual(&p) <= cfg.common_zero_tol {
                points.push(p);
            }
        }
    }
    if points.len() < support.len() + 1 {
        return Err(Error::Numeric(format!(
            "found {} common zeros, need more than {}",
            points.len(),
            support.len()
        )));
    }
    let mut a = DMatrix::from_fn(points.len(), support.len(), |i, k| {
        points[i][0].powu(support[k][0]) * points[i][1].powu(support[k][1])
    });
    for mut row in a.row_iter_mut() {
        let nrm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            row.scale_mut(1.0 / nrm);
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numeric("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let s0 = svd.singular_values[order[0]];
    let s1 = svd
        .singular_values
        .get(order.get(1).copied().unwrap_or(order[0]))
        .copied()
        .unwrap_or(1.0);
    let f = CPoly::from_terms(
        2,
        support
            .iter()
            .enumerate()
            .map(|(k, e)| (e.clone(), vt[(order[0], k)].conj())),
    );
    if s1 < 1e-6 {
        return Err(Error::Numeric(format!(
            "the support admits more than one vanishing polynomial (σ = {s0:.2e}, {s1:.2e})"
        )));
    }
    Ok(Extraction {
        f,
        points,
        singular_values: [s0, s1],
    })
}

/// `min_λ ‖λ g − f‖ / ‖f‖` over the union of the supports.
pub fn coefficient_error(f: &CPoly, g: &CPoly) -> f64 {
    let keys: std::collections::BTreeSet<&Vec<u32>> = f.terms.keys().chain(g.terms.keys()).collect();
    let fv: Vec<C64> = keys.iter().map(|e| f.coeff(e)).collect();
    let gv: Vec<C64> = keys.iter().map(|e| g.coeff(e)).collect();
    let gg: f64 = gv.iter().map(|z| z.norm_sqr()).sum();
    let ff: f64 = fv.iter().map(|z| z.norm_sqr()).sum();
    if gg == 0.0 || ff == 0.0 {
        return f64::INFINITY;
    }
    let lambda: C64 = gv.iter().zip(&fv).map(|(g, f)| g.conj() * f).sum::<C64>() / gg;
    let err: f64 = gv.iter().zip(&fv).map(|(g, f)| (lambda * g - f).norm_sqr()).sum();
    (err / ff).sqrt()
}

/// Random points of the curve: intersections with random members of the
/// linear system.
pub fn curve_samples<R: Rng + ?Sized>(
    f: &CPoly,
    family: &LineFamily,
    count: usize,
    tols: &Tolerances,
    rng: &mut R,
) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    for _ in 0..(8 * count).max(8) {
        if out.len() >= count {
            break;
        }
        let a = family.random_coefficients(rng);
        if let Ok(s) = intersection_points(f, family, &a, tols, None) {
            out.extend(s.points);
        }
    }
    out.truncate(count);
    out
}

/// `max |h̃(p) − h(p)| / max |h(p)|` over the samples.
pub fn form_error(h: &CPoly, h_tilde: &RationalForm, samples: &[Vec<C64>]) -> f64 {
    let scale = samples.iter().map(|p| h.eval(p).norm()).fold(0.0, f64::max);
    let err = samples
        .iter()
        .map(|p| (h_tilde.eval(p) - h.eval(p)).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}
