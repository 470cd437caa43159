//! Rational fitting of sampled functions of one complex variable.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{CPoly1, C64};

/// `r_j(a) = p_j(a) / q(a)`, one numerator per component and a shared
/// denominator.
#[derive(Debug, Clone, Serialize)]
pub struct RationalFit {
    pub numerators: Vec<Vec<C64>>,
    pub denominator: Vec<C64>,
    pub num_degree: usize,
    pub den_degree: usize,
    /// Relative residual on the nodes used for fitting.
    pub fit_residual: f64,
    /// Relative residual on held-out nodes.
    pub holdout_residual: f64,
}

impl RationalFit {
    pub fn components(&self) -> usize {
        self.numerators.len()
    }

    pub fn numerator(&self, j: usize) -> CPoly1 {
        CPoly1::new(self.numerators[j].clone())
    }

    pub fn denominator_poly(&self) -> CPoly1 {
        CPoly1::new(self.denominator.clone())
    }

    pub fn eval(&self, j: usize, a: C64) -> C64 {
        self.numerator(j).eval(a) / self.denominator_poly().eval(a)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitConfig {
    pub max_num_degree: usize,
    pub max_den_degree: usize,
    /// Held-out relative residual below which a fit is accepted.
    pub tol: f64,
    /// Every `holdout_stride`-th node is held out.
    pub holdout_stride: usize,
}

impl FitConfig {
    pub fn with_caps(cap: usize, tol: f64) -> Self {
        FitConfig {
            max_num_degree: cap,
            max_den_degree: cap,
            tol,
            holdout_stride: 4,
        }
    }
}

fn split_nodes(n: usize, stride: usize) -> (Vec<usize>, Vec<usize>) {
    let stride = stride.max(2);
    (0..n).partition(|i| i % stride != stride - 1)
}

/// `max |r(a) − s(a)| / max |s(a)|` over the indexed nodes and all
/// components; a component that vanishes identically is measured against the
/// others.
fn relative_residual(fit: &RationalFit, nodes: &[C64], values: &[Vec<C64>], idx: &[usize]) -> f64 {
    let scale = idx
        .iter()
        .flat_map(|&i| values[i].iter().map(|v| v.norm()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for &i in idx {
        for (j, v) in values[i].iter().enumerate() {
            let r = (fit.eval(j, nodes[i]) - v).norm() / scale;
            worst = worst.max(if r.is_finite() { r } else { f64::INFINITY });
        }
    }
    worst
}

/// Linearized least-squares fit `p_j(a) − s_j q(a) ≈ 0` for fixed degrees,
/// via the right singular vector of the smallest singular value.
fn fit_fixed(nodes: &[C64], values: &[Vec<C64>], idx: &[usize], dp: usize, dq: usize) -> Option<RationalFit> {
    let m = values[0].len();
    let cols = m * (dp + 1) + dq + 1;
    let rows = (idx.len() * m).max(cols);
    let mut a = DMatrix::from_element(rows, cols, C64::new(0.0, 0.0));
    for (r0, &i) in idx.iter().enumerate() {
        let x = nodes[i];
        for j in 0..m {
            let row = r0 * m + j;
            let mut pw = C64::new(1.0, 0.0);
            for k in 0..=dp.max(dq) {
                if k <= dp {
                    a[(row, j * (dp + 1) + k)] = pw;
                }
                if k <= dq {
                    a[(row, m * (dp + 1) + k)] = -values[i][j] * pw;
                }
                pw *= x;
            }
        }
    }
    let norms: Vec<f64> = (0..cols)
        .map(|c| a.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    for (c, &s) in norms.iter().enumerate() {
        if s > 0.0 {
            a.column_mut(c).scale_mut(1.0 / s);
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))?
        .0;
    let v: Vec<C64> = (0..cols)
        .map(|c| {
            let s = if norms[c] > 0.0 { norms[c] } else { 1.0 };
            vt[(k, c)].conj() / s
        })
        .collect();
    let den: Vec<C64> = v[m * (dp + 1)..].to_vec();
    if den.iter().all(|z| z.norm() == 0.0) {
        return None;
    }
    // normalize so the largest denominator coefficient is 1
    let piv = den.iter().cloned().max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    let numerators = (0..m)
        .map(|j| v[j * (dp + 1)..(j + 1) * (dp + 1)].iter().map(|z| z / piv).collect())
        .collect();
    Some(RationalFit {
        numerators,
        denominator: den.iter().map(|z| z / piv).collect(),
        num_degree: dp,
        den_degree: dq,
        fit_residual: 0.0,
        holdout_residual: 0.0,
    })
}

/// Fits the vector-valued samples with the smallest total degree whose
/// held-out residual passes `cfg.tol`. Returns the best attempt and whether
/// it passed.
pub fn fit_rational(nodes: &[C64], values: &[Vec<C64>], cfg: &FitConfig) -> Result<(RationalFit, bool)> {
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::Malformed("rational fit needs one value vector per node".into()));
    }
    let m = values[0].len();
    if m == 0 || values.iter().any(|v| v.len() != m) {
        return Err(Error::Malformed("inconsistent sample vectors".into()));
    }
    let (fit_idx, hold_idx) = split_nodes(nodes.len(), cfg.holdout_stride);
    if hold_idx.is_empty() {
        return Err(Error::Malformed("too few nodes to hold any out".into()));
    }
    let mut best: Option<RationalFit> = None;
    for total in 0..=(cfg.max_num_degree + cfg.max_den_degree) {
        for dq in 0..=total.min(cfg.max_den_degree) {
            let dp = total - dq;
            if dp > cfg.max_num_degree {
                continue;
            }
            // unknowns minus scale, with at least one spare equation per component
            if fit_idx.len() * m < m * (dp + 1) + dq + 1 + m || fit_idx.len() < dp + dq + 2 {
                continue;
            }
            let Some(mut fit) = fit_fixed(nodes, values, &fit_idx, dp, dq) else {
                continue;
            };
            fit.fit_residual = relative_residual(&fit, nodes, values, &fit_idx);
            fit.holdout_residual = relative_residual(&fit, nodes, values, &hold_idx);
            let pass = fit.holdout_residual <= cfg.tol;
            let better = best
                .as_ref()
                .map(|b| fit.holdout_residual < b.holdout_residual)
                .unwrap_or(true);
            if pass {
                return Ok((fit, true));
            }
            if better {
                best = Some(fit);
            }
        }
    }
    best.map(|b| (b, false))
        .ok_or_else(|| Error::Malformed("not enough nodes for any admissible degree".into()))
}

/// Whether scalar samples are matched by a rational function of bounded
/// degrees on held-out nodes.
pub fn rationality_test(
    nodes: &[C64],
    samples: &[C64],
    d_num: usize,
    d_den: usize,
    tol: f64,
) -> Result<(bool, RationalFit)> {
    if nodes.len() < d_num + d_den + 2 {
        return Err(Error::Malformed(format!(
            "{} nodes cannot determine a ({d_num},{d_den}) rational function",
            nodes.len()
        )));
    }
    let values: Vec<Vec<C64>> = samples.iter().map(|&s| vec![s]).collect();
    let cfg = FitConfig {
        max_num_degree: d_num,
        max_den_degree: d_den,
        tol,
        holdout_stride: 4,
    };
    let (fit, ok) = fit_rational(nodes, &values, &cfg)?;
    Ok((ok, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<C64> {
        (0..n)
            .map(|k| C64::from_polar(0.5 + 0.1 * (k % 3) as f64, 0.7 * k as f64))
            .collect()
    }

    #[test]
    fn recovers_one_over_one_plus_a() {
        let nodes = grid(16);
        let s: Vec<C64> = nodes.iter().map(|a| (C64::new(1.0, 0.0) + a).inv()).collect();
        let (ok, fit) = rationality_test(&nodes, &s, 3, 3, 1e-9).unwrap();
        assert!(ok);
        assert_eq!((fit.num_degree, fit.den_degree), (0, 1));
        assert!(fit.holdout_residual < 1e-12);
    }

    #[test]
    fn polynomial_vector_with_common_denominator() {
        let nodes = grid(20);
        let vals: Vec<Vec<C64>> = nodes
            .iter()
            .map(|&a| {
                let q = C64::new(2.0, 0.0) - a;
                vec![(a * a + 1.0) / q, (C64::new(0.0, 3.0) * a) / q]
            })
            .collect();
        let (fit, ok) = fit_rational(&nodes, &vals, &FitConfig::with_caps(4, 1e-9)).unwrap();
        assert!(ok);
        assert_eq!(fit.den_degree, 1);
        assert_eq!(fit.num_degree, 2);
    }

    #[test]
    fn exponential_on_a_spiral_is_not_rational() {
        let nodes: Vec<C64> = (0..12)
            .map(|k| {
                let r = 1.0 + 7.0 * k as f64 / 11.0;
                C64::from_polar(r, 2.4 * k as f64)
            })
            .collect();
        let s: Vec<C64> = nodes.iter().map(|a| a.exp()).collect();
        let (ok, fit) = rationality_test(&nodes, &s, 4, 4, 1e-8).unwrap();
        assert!(!ok);
        assert!(fit.holdout_residual >= 1e-2, "{}", fit.holdout_residual);
    }
}
