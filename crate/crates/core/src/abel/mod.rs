//! Numeric Abel-trace inversion on a toric surface: from the traces of a
//! form along a curve, recover the curve and the form.

mod family;
mod fit;
mod inversion;
mod trace;

pub use family::{curve_class, curve_divisor, random_polynomial, support_of, LineFamily};
pub use fit::{fit_rational, rationality_test, FitConfig, RationalFit};
pub use inversion::{
    coefficient_error, curve_samples, extract_curve, fit_form, fit_trace_matrix, form_error, reconstruct_form,
    reconstruct_hypersurface, Extraction, ExtractionConfig, FormFit, RationalForm, TraceMatrixFit, TRACE_RCOND,
};
pub use trace::{
    build_dataset, intersection_points, power_traces, propagation_check, ring_grid, trace_form_coefficients,
    DroppedNode, NodeTraces, PropagationReport, TraceDataset,
};

use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::bundles::random_unit_circle;
use crate::error::{Error, Result};
use crate::numeric::{CPoly, Tolerances, C64};
use crate::polytope::mixed_volume;

#[derive(Debug, Clone, Serialize)]
pub struct InversionConfig {
    pub tols: Tolerances,
    /// Held-out residual accepted by the rational fits.
    pub fit_tol: f64,
    /// Degree caps of the fits are `N + cap_extra`.
    pub cap_extra: usize,
    pub radii: Vec<f64>,
    pub max_singular_fraction: f64,
    pub extraction: ExtractionConfig,
    /// Tolerance on the recovered coefficients and form values.
    pub recovery_tol: f64,
    pub form_samples: usize,
    /// Fresh draws of the line coefficients and `c` allowed per run when a
    /// draw lands near a degenerate configuration.
    pub draws: usize,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            tols: Tolerances::default(),
            fit_tol: 1e-8,
            cap_extra: 2,
            radii: vec![0.7, 1.1, 1.5],
            max_singular_fraction: 0.2,
            extraction: ExtractionConfig::default(),
            recovery_tol: 1e-5,
            form_samples: 24,
            draws: 3,
        }
    }
}

/// Number of intersection points of a curve with the given support and a
/// generic member of the family, counted in the chart.
pub fn expected_count(family: &LineFamily, f: &CPoly) -> Result<usize> {
    let mv = mixed_volume(&[f.newton_polytope(), family.chart_polytope()?.clone()], 2)?;
    mv.to_integer()
        .to_usize()
        .ok_or_else(|| Error::Numeric("mixed volume out of range".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub a: Vec<C64>,
    pub c: [C64; 2],
    /// Draws of `(a, c)` rejected before this one.
    pub redraws: usize,
    pub nodes: usize,
    /// `a_0` at the nodes that entered the fits.
    pub grid: Vec<C64>,
    pub dropped: usize,
    pub sigma_degrees: (usize, usize),
    pub sigma_holdout: f64,
    pub sigma_rational: bool,
    pub hypersurface_degree: u32,
}

impl RunSummary {
    /// Full coefficient vectors of the family members at the fitted nodes.
    pub fn node_coefficients(&self, family: &LineFamily) -> Vec<Vec<C64>> {
        self.grid.iter().map(|&a0| family.with_base(&self.a, a0)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub n_points: usize,
    pub runs: Vec<RunSummary>,
    pub form_degrees: (usize, usize),
    pub form_holdout: f64,
    /// Every fitted trace coefficient passed held-out validation.
    pub rational: bool,
    pub curve: CPoly,
    pub extraction_points: usize,
    pub singular_values: [f64; 2],
    pub coefficient_error: f64,
    pub form_error: f64,
    pub recovery_tol: f64,
    pub passed: bool,
}

fn one_run<R: Rng + ?Sized>(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    n: usize,
    cfg: &InversionConfig,
    rng: &mut R,
) -> Result<(TraceDataset, TraceMatrixFit, CPoly, usize)> {
    let grid = ring_grid(n, &cfg.radii);
    let fcfg = FitConfig::with_caps(n + cfg.cap_extra, cfg.fit_tol);
    let mut last = None;
    for redraws in 0..cfg.draws.max(1) {
        let a = family.random_coefficients(rng);
        let c = [random_unit_circle(rng), random_unit_circle(rng)];
        let attempt = build_dataset(f, h, family, &a, c, &grid, n, &cfg.tols)
            .and_then(|ds| fit_trace_matrix(&ds, &fcfg, cfg.max_singular_fraction).map(|tm| (ds, tm)));
        match attempt {
            Ok((ds, tm)) => {
                let q = reconstruct_hypersurface(&tm, family, &ds);
                return Ok((ds, tm, q, redraws));
            }
            Err(e) => {
                log::debug!("draw {redraws} rejected: {e}");
                last = Some(e);
            }
        }
    }
    Err(last.expect("at least one draw"))
}

/// Synthesizes traces of `h` along `{f = 0}`, then recovers `f` on
/// `support` and `h` on the curve from the traces alone. The hidden `f` and
/// `h` are used only to produce traces and to score the result.
pub fn invert<R: Rng + ?Sized>(
    f: &CPoly,
    h: &CPoly,
    family: &LineFamily,
    support: &[Vec<u32>],
    cfg: &InversionConfig,
    rng: &mut R,
) -> Result<Reconstruction> {
    let n = expected_count(family, f)?;
    let (ds1, tm1, q1, r1) = one_run(f, h, family, n, cfg, rng)?;
    let (ds2, tm2, q2, r2) = one_run(f, h, family, n, cfg, rng)?;
    let form = fit_form(&ds1, &FitConfig::with_caps(n + cfg.cap_extra, cfg.fit_tol))?;
    let h_tilde = reconstruct_form(&form, family, &ds1);
    let ex = extract_curve(&q1, &q2, support, &cfg.extraction, rng)?;
    let coefficient_error = coefficient_error(f, &ex.f);
    let samples = curve_samples(f, family, cfg.form_samples, &cfg.tols, rng);
    let form_error = form_error(h, &h_tilde, &samples);
    let summary = |ds: &TraceDataset, tm: &TraceMatrixFit, q: &CPoly, redraws: usize| RunSummary {
        a: ds.a.clone(),
        c: ds.c,
        redraws,
        nodes: ds.nodes.len(),
        grid: ds.nodes.iter().map(|nt| nt.a0).collect(),
        dropped: ds.dropped.len(),
        sigma_degrees: (tm.fit.num_degree, tm.fit.den_degree),
        sigma_holdout: tm.fit.holdout_residual,
        sigma_rational: tm.rational,
        hypersurface_degree: q.total_degree(),
    };
    let rational = tm1.rational && tm2.rational && form.rational;
    let passed =
        rational && coefficient_error <= cfg.recovery_tol && form_error <= cfg.recovery_tol && !samples.is_empty();
    Ok(Reconstruction {
        n_points: n,
        runs: vec![summary(&ds1, &tm1, &q1, r1), summary(&ds2, &tm2, &q2, r2)],
        form_degrees: (form.fit.num_degree, form.fit.den_degree),
        form_holdout: form.fit.holdout_residual,
        rational,
        curve: ex.f,
        extraction_points: ex.points.len(),
        singular_values: ex.singular_values,
        coefficient_error,
        form_error,
        recovery_tol: cfg.recovery_tol,
        passed,
    })
}
