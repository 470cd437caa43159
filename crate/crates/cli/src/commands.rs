use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toricabel::abel::{
    self, curve_class, propagation_check, random_polynomial, support_of, InversionConfig, LineFamily,
};
use toricabel::io::{parse_bundle, parse_chart_polynomial, parse_cone, parse_cycle, parse_fan, NamedFan};
use toricabel::numeric::CPoly;
use toricabel::{
    cycle_intersection, intersection_number, orbital_decomposition, positivity_table, resultant_multidegree,
    validate_fan, Error, Result, SplitBundle, Tolerances, C64,
};

use crate::render::{big, cone, poly, Output};
use crate::{Cli, Command, Input};

fn load(input: &Input) -> Result<(NamedFan, SplitBundle)> {
    let nf = parse_fan(&input.fan)?;
    let report = validate_fan(&nf.fan);
    if !report.smooth || !report.complete {
        return Err(Error::Malformed(format!(
            "the fan must be smooth and complete: {}",
            report.failures.join("; ")
        )));
    }
    let e = parse_bundle(&nf, &input.bundle)?;
    Ok((nf, e))
}

fn tolerances(cli: &Cli) -> Tolerances {
    Tolerances {
        tol: cli.tol,
        cluster: cli.cluster,
        singular: cli.singular,
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.cmd {
        Command::Check(input) => check(cli, input),
        Command::Decompose(input) => decompose(cli, input),
        Command::Mixvol { input, tau } => mixvol(cli, input, tau.as_deref()),
        Command::ResultantDegree { input, cycle } => resultant_degree(cli, input, cycle),
        Command::Invert {
            input,
            curve,
            random,
            form,
            form_const,
            form_zero,
            chart,
        } => {
            let form = match (form, form_const, form_zero) {
                (Some(f), _, _) => FormChoice::Given(f.clone()),
                (_, true, _) => FormChoice::Const,
                (_, _, true) => FormChoice::Zero,
                _ => FormChoice::Random,
            };
            invert(cli, input, curve.as_deref(), random.as_deref(), form, *chart)
        }
    }
}

fn check(cli: &Cli, input: &Input) -> Result<Output> {
    let (nf, e) = load(input)?;
    let fan = &nf.fan;
    let bundles: Vec<Value> = e
        .line_bundles()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let split = l.mobile_fixed_split().ok();
            json!({
                "index": i,
                "k": l.divisor().k.iter().map(big).collect::<Vec<_>>(),
                "sections": l.sections(),
                "globally_generated": l.is_globally_generated(),
                "base_locus": l.base_locus_cones().iter().map(cone).collect::<Vec<_>>(),
                "fixed_part": split.map(|(_, fixed)| fixed.k.iter().map(big).collect::<Vec<_>>()),
            })
        })
        .collect();
    let mut star = Vec::new();
    for s in fan.max_cones() {
        star.push(json!({"chart": cone(s), "holds": e.satisfies_condition_star(s)?}));
    }
    let positivity: Vec<Value> = positivity_table(&e)?
        .iter()
        .map(|(t, v)| json!({"tau": cone(t), "number": big(v)}))
        .collect();
    let report = json!({
        "command": "check",
        "fan": {"name": nf.name, "dim": fan.dim(), "rays": fan.rays().len(), "smooth": true, "complete": true},
        "rank": e.rank(),
        "bundles": bundles,
        "globally_generated": e.is_globally_generated(),
        "essential": e.is_essential(),
        "very_ample": e.is_very_ample_bundle()?,
        "positivity": positivity,
        "condition_star": star,
    });
    Output::new(cli, report, 0)
}

fn decompose(cli: &Cli, input: &Input) -> Result<Output> {
    let (_, e) = load(input)?;
    let table = orbital_decomposition(&e)?;
    let rows: Vec<Value> = table
        .entries
        .iter()
        .map(|r| {
            json!({
                "subset": r.subset,
                "tau": cone(&r.tau),
                "codim": r.codim,
                "empty_virtual": r.empty_virtual,
                "mobile_dims": r.mobile_dims,
            })
        })
        .collect();
    let report = json!({
        "command": "decompose",
        "rank": e.rank(),
        "essential": e.is_essential(),
        "globally_generated": e.is_globally_generated(),
        "candidates": table.candidates,
        "rows": rows,
    });
    Output::new(cli, report, 0)
}

fn mixvol(cli: &Cli, input: &Input, tau: Option<&str>) -> Result<Output> {
    let (nf, e) = load(input)?;
    let rows: Vec<Value> = match tau {
        Some(t) => {
            let c = parse_cone(&nf.fan, t)?;
            vec![json!({"tau": cone(&c), "number": big(&intersection_number(&e, &c)?)})]
        }
        None => positivity_table(&e)?
            .iter()
            .map(|(t, v)| json!({"tau": cone(t), "number": big(v)}))
            .collect(),
    };
    Output::new(cli, json!({"command": "mixvol", "rank": e.rank(), "numbers": rows}), 0)
}

fn resultant_degree(cli: &Cli, input: &Input, cycle: &str) -> Result<Output> {
    let (nf, e) = load(input)?;
    let w = parse_cycle(&nf.fan, cycle, e.rank().saturating_sub(1))?;
    let d = resultant_multidegree(&e, &w)?;
    let report = json!({
        "command": "resultant-degree",
        "cycle": w.coeffs.iter().map(|(t, nu)| json!([cone(t), big(nu)])).collect::<Vec<_>>(),
        "dim": w.dim,
        "multidegree": d.iter().map(big).collect::<Vec<_>>(),
    });
    Output::new(cli, report, 0)
}

pub enum FormChoice {
    Given(String),
    Const,
    Zero,
    Random,
}

fn invert(
    cli: &Cli,
    input: &Input,
    curve: Option<&str>,
    random: Option<&str>,
    form: FormChoice,
    chart: usize,
) -> Result<Output> {
    let (nf, e) = load(input)?;
    let fan = &nf.fan;
    let sigma = fan
        .max_cones()
        .get(chart)
        .ok_or_else(|| Error::Malformed(format!("chart index {chart} out of range")))?
        .clone();
    let family = LineFamily::new(&e, &sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let tols = tolerances(cli);

    let (f, support) = match (curve, random) {
        (Some(c), _) => {
            let f = parse_chart_polynomial(c, 2)?;
            if f.is_zero() {
                return Err(Error::Malformed("the curve polynomial is zero".into()));
            }
            let sup = support_of(&f.newton_polytope())?;
            (f, sup)
        }
        (None, Some(spec)) => {
            let lb = parse_bundle(&nf, spec)?;
            if lb.rank() != 1 {
                return Err(Error::Malformed("--random takes a single line bundle".into()));
            }
            let l = &lb.line_bundles()[0];
            let sup = l
                .polytope()
                .lattice_points()
                .iter()
                .map(|m| {
                    l.chart_exponent(m, &sigma)
                        .map(|ex| ex.iter().map(|x| u32::try_from(x).expect("nonnegative")).collect())
                })
                .collect::<Result<Vec<Vec<u32>>>>()?;
            if sup.len() < 2 {
                return Err(Error::NoSections(
                    "the random curve's bundle has fewer than two sections".into(),
                ));
            }
            (random_polynomial(2, &sup, &mut rng), sup)
        }
        (None, None) => return Err(Error::Malformed("give --curve or --random".into())),
    };
    let h = match form {
        FormChoice::Given(s) => parse_chart_polynomial(&s, 2)?,
        FormChoice::Const => CPoly::constant(2, C64::new(1.0, 0.0)),
        FormChoice::Zero => CPoly::zero(2),
        FormChoice::Random => random_polynomial(2, family.exponents(), &mut rng),
    };
    let class_number = cycle_intersection(&e, &curve_class(fan, &sigma, &support)?)?;

    let cfg = InversionConfig {
        tols,
        fit_tol: cli.fit_tol,
        ..InversionConfig::default()
    };
    let started = std::time::Instant::now();
    let rec = abel::invert(&f, &h, &family, &support, &cfg, &mut rng)?;
    log::info!("inversion finished in {:?}", started.elapsed());
    // m′ = (1,1) keeps the compared traces clear of Euler–Jacobi vanishing.
    let samples = rec.runs[0].node_coefficients(&family);
    let prop = propagation_check(&f, &h, &family, &samples, &[1, 0], &[1, 1], 1e-4, &tols)?;

    let runs: Vec<Value> = rec
        .runs
        .iter()
        .map(|r| {
            json!({
                "a": r.a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "c": r.c.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "redraws": r.redraws,
                "nodes": r.nodes,
                "dropped": r.dropped,
                "sigma_degrees": [r.sigma_degrees.0, r.sigma_degrees.1],
                "sigma_holdout_residual": r.sigma_holdout,
                "sigma_rational": r.sigma_rational,
                "hypersurface_degree": r.hypersurface_degree,
            })
        })
        .collect();
    let report = json!({
        "command": "invert",
        "chart": cone(&sigma),
        "seed": cli.seed,
        "n_points": rec.n_points,
        "class_intersection": big(&class_number),
        "hidden_curve": poly(&f),
        "form": poly(&h),
        "runs": runs,
        "form_degrees": [rec.form_degrees.0, rec.form_degrees.1],
        "form_holdout_residual": rec.form_holdout,
        "rational": rec.rational,
        "recovered_curve": poly(&rec.curve),
        "extraction_points": rec.extraction_points,
        "extraction_singular_values": rec.singular_values,
        "coefficient_error": rec.coefficient_error,
        "form_error": rec.form_error,
        "recovery_tol": rec.recovery_tol,
        "propagation": {
            "m": prop.m, "m_prime": prop.m_prime, "step": prop.step,
            "discrepancy": prop.discrepancy, "discrepancy_half_step": prop.discrepancy_half,
            "ratio": prop.ratio, "scale": prop.scale, "relative": prop.relative,
            "nodes": prop.samples,
        },
        "passed": rec.passed,
    });
    Output::new(cli, report, if rec.passed { 0 } else { 3 })
}
