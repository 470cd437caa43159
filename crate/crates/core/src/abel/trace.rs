//! Trace data of a form along the curve, sampled over a line of the linear
//! system.

use rayon::prelude::*;
use serde::Serialize;

use super::family::LineFamily;
use crate::error::{Error, Result};
use crate::numeric::{jacobian_det, solve_bivariate, CPoly, SolutionSet, Tolerances, C64};

/// Transversal intersection `V ∩ C_a` in the chart.
pub fn intersection_points(
    f: &CPoly,
    family: &LineFamily,
    a: &[C64],
    tols: &Tolerances,
    expected: Option<usize>,
) -> Result<SolutionSet> {
    let l = family.line(a);
    let sols = solve_bivariate(f, &l, tols)?;
    if let Some(i) = sols.flags.iter().position(|fl| fl.any()) {
        return Err(Error::NonTransversal(format!(
            "intersection point {i} is flagged {:?}; resample the coefficients",
            sols.flags[i]
        )));
    }
    if let Some(n) = expected {
        if sols.len() != n {
            return Err(Error::CountMismatch {
                expected: n,
                found: sols.len(),
            });
        }
    }
    Ok(sols)
}

/// Traces at one value of `a_0`.
#[derive(Debug, Clone, Serialize)]
pub struct NodeTraces {
    pub a0: C64,
    pub points: Vec<Vec<C64>>,
    /// `y_j = c · p_j`.
    pub y: Vec<C64>,
    /// `det ∂(f,l)/∂x` at each point.
    pub jacobians: Vec<C64>,
    /// `w_k = Σ_j y_j^k h(p_j)/J_j`.
    pub w: Vec<C64>,
    /// `t_k = Σ_j y_j^k / J_j`.
    pub t: Vec<C64>,
}

impl NodeTraces {
    /// Smallest pairwise distance between the `y_j`.
    pub fn y_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.y.len() {
            for j in i + 1..self.y.len() {
                best = best.min((self.y[i] - self.y[j]).norm());
            }
        }
        best
    }
}

/// `w_k` and `t_k` for `k < kmax` at the coefficient vector `a`.
#[allow(clippy::too_many_arguments)]
pub fn power_traces(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    a: &[C64],
    c: [C64; 2],
    kmax: usize,
    tols: &Tolerances,
    expected: Option<usize>,
) -> Result<NodeTraces> {
    let sols = intersection_points(f, family, a, tols, expected)?;
    let system = [f.clone(), family.line(a)];
    let mut w = vec![C64::new(0.0, 0.0); kmax];
    let mut t = vec![C64::new(0.0, 0.0); kmax];
    let mut ys = Vec::with_capacity(sols.len());
    let mut js = Vec::with_capacity(sols.len());
    for p in &sols.points {
        let jac = jacobian_det(&system, p);
        let y = c[0] * p[0] + c[1] * p[1];
        let hv = h.eval(p);
        let mut pw = jac.inv();
        for k in 0..kmax {
            t[k] += pw;
            w[k] += pw * hv;
            pw *= y;
        }
        ys.push(y);
        js.push(jac);
    }
    Ok(NodeTraces {
        a0: a[family.base_index()],
        points: sols.points,
        y: ys,
        jacobians: js,
        w,
        t,
    })
}

/// `v_m = Σ_j p_j^m h(p_j)/J_j` for each requested exponent `m`.
pub fn trace_form_coefficients(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    a: &[C64],
    ms: &[Vec<u32>],
    tols: &Tolerances,
) -> Result<Vec<C64>> {
    let sols = intersection_points(f, family, a, tols, None)?;
    let system = [f.clone(), family.line(a)];
    let mut v = vec![C64::new(0.0, 0.0); ms.len()];
    for p in &sols.points {
        let u = h.eval(p) / jacobian_det(&system, p);
        for (vi, m) in v.iter_mut().zip(ms) {
            *vi += u * p[0].powu(m[0]) * p[1].powu(m[1]);
        }
    }
    Ok(v)
}

/// `N + 4` nodes on each ring of radius `radii[r]`, at least `2N + 6` in all.
pub fn ring_grid(n_points: usize, radii: &[f64]) -> Vec<C64> {
    let per = (n_points + 4).max((2 * n_points + 6).div_ceil(radii.len().max(1)));
    let mut out = Vec::with_capacity(per * radii.len());
    for (r, &rad) in radii.iter().enumerate() {
        let offset = 0.37 * r as f64 + 0.11;
        for k in 0..per {
            let theta = std::f64::consts::TAU * k as f64 / per as f64 + offset;
            out.push(C64::from_polar(rad, theta));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DroppedNode {
    pub a0: C64,
    pub reason: String,
}

/// Traces over a grid of `a_0` with the other coefficients and the linear
/// form `y = c · x` held fixed.
#[derive(Debug, Clone, Serialize)]
pub struct TraceDataset {
    pub n_points: usize,
    /// Coefficients of the line family; the `a_0` slot is overwritten per node.
    pub a: Vec<C64>,
    pub c: [C64; 2],
    pub nodes: Vec<NodeTraces>,
    pub dropped: Vec<DroppedNode>,
}

/// Nodes whose intersection is not transversal, has the wrong count or has
/// coincident `y_j` are dropped and logged.
#[allow(clippy::too_many_arguments)]
pub fn build_dataset(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    a: &[C64],
    c: [C64; 2],
    grid: &[C64],
    n_points: usize,
    tols: &Tolerances,
) -> Result<TraceDataset> {
    if n_points == 0 {
        return Err(Error::CountMismatch { expected: 1, found: 0 });
    }
    let results: Vec<(C64, Result<NodeTraces>)> = grid
        .par_iter()
        .map(|&a0| {
            let coeffs = family.with_base(a, a0);
            (
                a0,
                power_traces(f, h, family, &coeffs, c, 2 * n_points, tols, Some(n_points)),
            )
        })
        .collect();
    let mut nodes = Vec::new();
    let mut dropped = Vec::new();
    for (a0, r) in results {
        match r {
            Ok(nt) if nt.y_separation() < 1e-6 => dropped.push(DroppedNode {
                a0,
                reason: format!("coincident projections ({:.2e})", nt.y_separation()),
            }),
            Ok(nt) => nodes.push(nt),
            Err(e) => {
                log::warn!("dropping node a0 = {a0}: {e}");
                dropped.push(DroppedNode {
                    a0,
                    reason: e.to_string(),
                })
            }
        }
    }
    let needed = (2 * n_points + 6).min(grid.len());
    if nodes.len() < needed * 3 / 4 {
        return Err(Error::Numeric(format!(
            "only {} of {} grid nodes are usable",
            nodes.len(),
            grid.len()
        )));
    }
    Ok(TraceDataset {
        n_points,
        a: a.to_vec(),
        c,
        nodes,
        dropped,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationReport {
    pub m: Vec<u32>,
    pub m_prime: Vec<u32>,
    pub step: f64,
    /// Max over the sample coefficients of `|∂_{a_m} v_{m′} − ∂_{a_0} v_{m+m′}|`
    /// by central differences with `step`.
    pub discrepancy: f64,
    /// The same with `step / 2`.
    pub discrepancy_half: f64,
    /// `discrepancy / discrepancy_half`; about 4 when truncation dominates.
    pub ratio: f64,
    /// Largest `|∂_{a_0} v_{m+m′}|` over the samples.
    pub scale: f64,
    /// `discrepancy / scale`.
    pub relative: f64,
    pub samples: usize,
}

#[allow(clippy::too_many_arguments)]
fn central_difference(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    a: &[C64],
    idx: usize,
    m: &[u32],
    step: f64,
    tols: &Tolerances,
) -> Result<C64> {
    let mut plus = a.to_vec();
    let mut minus = a.to_vec();
    plus[idx] += step;
    minus[idx] -= step;
    let ms = [m.to_vec()];
    let vp = trace_form_coefficients(f, h, family, &plus, &ms, tols)?[0];
    let vm = trace_form_coefficients(f, h, family, &minus, &ms, tols)?[0];
    Ok((vp - vm) / (2.0 * step))
}

/// Compares `∂v_{m′}/∂a_m` with `∂v_{m+m′}/∂a_0` at each coefficient vector.
#[allow(clippy::too_many_arguments)]
pub fn propagation_check(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    samples: &[Vec<C64>],
    m: &[u32],
    m_prime: &[u32],
    step: f64,
    tols: &Tolerances,
) -> Result<PropagationReport> {
    let idx = family
        .exponent_index(m)
        .ok_or_else(|| Error::Malformed(format!("{m:?} is not an exponent of the line family")))?;
    if samples.is_empty() {
        return Err(Error::Malformed("no sample coefficients".into()));
    }
    let base = family.base_index();
    let mm: Vec<u32> = m.iter().zip(m_prime).map(|(a, b)| a + b).collect();
    let disc = |a: &Vec<C64>, s: f64| -> Result<(f64, f64)> {
        let lhs = central_difference(f, h, family, a, idx, m_prime, s, tols)?;
        let rhs = central_difference(f, h, family, a, base, &mm, s, tols)?;
        Ok(((lhs - rhs).norm(), rhs.norm()))
    };
    let mut d1: f64 = 0.0;
    let mut d2: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in samples {
        let (d, r) = disc(a, step)?;
        d1 = d1.max(d);
        scale = scale.max(r);
        d2 = d2.max(disc(a, step / 2.0)?.0);
    }
    Ok(PropagationReport {
        m: m.to_vec(),
        m_prime: m_prime.to_vec(),
        step,
        discrepancy: d1,
        discrepancy_half: d2,
        ratio: if d2 > 0.0 { d1 / d2 } else { f64::INFINITY },
        scale,
        relative: if scale > 0.0 { d1 / scale } else { d1 },
        samples: samples.len(),
    })
}
