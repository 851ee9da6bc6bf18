use std::path::Path;

use discos_core::engine::{sample_coefficients, sample_coefficients_2d, CosExpansion};
use discos_core::kernels::{convergence_trace, verify_bounds};
use discos_core::models::{DiscreteDist, Model, ModelSpec};
use discos_core::oracles::{
    exact_moment, gpb_convolve, gpb_enumerate, monte_carlo_cdf, monte_carlo_samples, DiscreteSampler, ExactCdf,
    Sampler, ENUMERATION_LIMIT,
};
use discos_core::truncation::RangeRule;
use discos_core::{CharFn1D, FilterSpec};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{num, CsvOut};

struct Loaded {
    spec: ModelSpec,
    model: Model,
}

fn load(path: &Path) -> CliResult<Loaded> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("model {}: {e}", path.display())))?;
    let spec: ModelSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("model {}: {e}", path.display())))?;
    let model = spec
        .clone()
        .build()
        .map_err(|e| CliError::Validation(format!("model {}: {e}", path.display())))?;
    Ok(Loaded { spec, model })
}

/// Command-line rule, else the model's stored range, else its padded
/// support, else the Hawkes rule.
fn resolve_range(args: &ModelArgs, m: &Loaded, cf: &dyn CharFn1D) -> CliResult<(RangeRule, f64, f64)> {
    let rule = match args.range_rule()? {
        Some(r) => r,
        None => match m.spec.preferred_range() {
            Some((a, b)) => RangeRule::Explicit { a, b },
            // lattice laws get half a unit on each side so PMF windows fit
            None if matches!(&m.model, Model::Gpb(g) if g.is_integer_valued()) => {
                let (lo, hi) = m.model.support_hull().expect("gpb is bounded");
                RangeRule::Explicit {
                    a: lo - 0.5,
                    b: hi + 0.5,
                }
            }
            None if m.model.support_hull().is_some() => RangeRule::SUPPORT_DEFAULT,
            None => RangeRule::HAWKES_DEFAULT,
        },
    };
    let (a, b) = rule.resolve(&m.model, cf)?;
    Ok((rule, a, b))
}

fn base_params(path: &Path, m: &Loaded, filter: &FilterSpec, k: usize) -> Vec<(&'static str, String)> {
    let mut p = vec![
        ("model", path.display().to_string()),
        ("type", m.model.type_name().to_string()),
        ("K", k.to_string()),
        ("filter", filter.to_string()),
    ];
    if let Some(alpha) = filter.alpha(k) {
        p.push(("alpha", format!("{alpha:e}")));
    }
    p
}

fn range_params(p: &mut Vec<(&'static str, String)>, rule: &RangeRule, a: f64, b: f64) {
    p.push(("range", rule.to_string()));
    p.push(("a", format!("{a:e}")));
    p.push(("b", format!("{b:e}")));
}

fn interior(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| a + (b - a) * i as f64 / (n + 1) as f64).collect()
}

/// Integers strictly inside (a, b) with at least half a unit to spare.
fn integer_support(a: f64, b: f64, from: f64) -> Vec<f64> {
    let start = from.max((a + 0.5).ceil());
    let mut out = Vec::new();
    let mut n = start;
    while n + 0.5 <= b {
        out.push(n);
        n += 1.0;
    }
    out
}

/// A quarter of the smallest gap between neighbours and to the ends.
fn default_dx(support: &[f64], a: f64, b: f64) -> f64 {
    let mut gap = (support[0] - a).min(b - support[support.len() - 1]);
    for w in support.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    0.25 * gap
}

struct Inversion<'m> {
    cf: Box<dyn CharFn1D + 'm>,
    rule: RangeRule,
    a: f64,
    b: f64,
}

fn prepare<'m>(args: &ModelArgs, m: &'m Loaded) -> CliResult<Inversion<'m>> {
    let cf = m.model.charfn_1d(args.steps)?;
    let (rule, a, b) = resolve_range(args, m, &*cf)?;
    Ok(Inversion { cf, rule, a, b })
}

fn steps_param(p: &mut Vec<(&'static str, String)>, m: &Loaded, steps: usize) {
    if matches!(m.model, Model::Hawkes(_)) {
        p.push(("steps", steps.to_string()));
    }
}

pub fn cdf(args: &CdfArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model.model)?;
    let inv = prepare(&args.model, &m)?;
    let xs = match (args.points.grid, args.points.at.is_empty()) {
        (Some(_), false) => return Err(CliError::Validation("--at and --grid are mutually exclusive".into())),
        (Some(n), true) => interior(inv.a, inv.b, n),
        (None, false) => args.points.at.clone(),
        (None, true) => return Err(CliError::Validation("cdf: give --at or --grid".into())),
    };
    let e = sample_coefficients(&*inv.cf, inv.a, inv.b, args.k)?;
    let values = if args.clamp {
        e.clamped_cdf(&filter, &xs)?
    } else {
        e.filtered_cdf_many(&filter, &xs)?
    };
    let mut p = base_params(&args.model.model, &m, &filter, args.k);
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    steps_param(&mut p, &m, args.model.steps);
    p.push(("clamp", args.clamp.to_string()));
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["x", "value"])?;
    for (x, v) in xs.iter().zip(&values) {
        out.row(&[num(*x), num(*v)])?;
    }
    out.finish()
}

pub fn pmf(args: &PmfArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model.model)?;
    let inv = prepare(&args.model, &m)?;
    let support = if !args.support.is_empty() {
        args.support.clone()
    } else {
        match &m.model {
            Model::Discrete(d) => d.points().to_vec(),
            Model::Gpb(g) if g.is_integer_valued() => integer_support(inv.a, inv.b, f64::NEG_INFINITY),
            Model::Hawkes(h) => integer_support(inv.a, inv.b, h.count_t as f64),
            _ => {
                return Err(CliError::Validation(
                    "pmf: --support is required for models off the integer lattice".into(),
                ))
            }
        }
    };
    if support.is_empty() {
        return Err(CliError::Validation("pmf: no support points inside the range".into()));
    }
    let dx = args.dx.unwrap_or_else(|| default_dx(&support, inv.a, inv.b));
    let e = sample_coefficients(&*inv.cf, inv.a, inv.b, args.k)?;
    let masses = e.recover_pmf(&filter, &support, dx)?;
    let mut p = base_params(&args.model.model, &m, &filter, args.k);
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    steps_param(&mut p, &m, args.model.steps);
    p.push(("dx", format!("{dx:e}")));
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["x", "value"])?;
    for (x, v) in support.iter().zip(&masses) {
        out.row(&[num(*x), num(*v)])?;
    }
    out.finish()
}

pub fn moment(args: &MomentArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model.model)?;
    let inv = prepare(&args.model, &m)?;
    let e = sample_coefficients(&*inv.cf, inv.a, inv.b, args.k)?;
    let mut p = base_params(&args.model.model, &m, &filter, args.k);
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    steps_param(&mut p, &m, args.model.steps);
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["q", "value"])?;
    for &q in &args.q {
        out.row(&[q.to_string(), num(e.cos_moment(&filter, q))])?;
    }
    out.finish()
}

fn pair(v: &[f64], flag: &str) -> CliResult<Option<[f64; 2]>> {
    match v.len() {
        0 => Ok(None),
        2 => Ok(Some([v[0], v[1]])),
        n => Err(CliError::Validation(format!("{flag}: expected a,b, got {n} values"))),
    }
}

pub fn cdf2d(args: &Cdf2dArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model)?;
    let Model::Discrete2D(d) = &m.model else {
        return Err(CliError::Validation(format!(
            "cdf2d: model type must be discrete2d, got {}",
            m.model.type_name()
        )));
    };
    let (r1, r2) = (pair(&args.range1, "--range1")?, pair(&args.range2, "--range2")?);
    let (lo, hi) = match m.spec.preferred_range_2d() {
        Some(r) => r,
        None => {
            let (lo, hi) = d.hull();
            let mut a = [0.0; 2];
            let mut b = [0.0; 2];
            for i in 0..2 {
                let w = if hi[i] > lo[i] {
                    hi[i] - lo[i]
                } else {
                    lo[i].abs().max(1.0)
                };
                a[i] = lo[i] - 0.01 * w;
                b[i] = hi[i] + 0.01 * w;
            }
            (a, b)
        }
    };
    let a = [r1.map_or(lo[0], |r| r[0]), r2.map_or(lo[1], |r| r[0])];
    let b = [r1.map_or(hi[0], |r| r[1]), r2.map_or(hi[1], |r| r[1])];
    let e = sample_coefficients_2d(d, a, b, args.k1, args.k2)?;
    let mut p = vec![
        ("model", args.model.display().to_string()),
        ("type", m.model.type_name().to_string()),
        ("K1", args.k1.to_string()),
        ("K2", args.k2.to_string()),
        ("filter", filter.to_string()),
        ("a1", format!("{:e}", a[0])),
        ("b1", format!("{:e}", b[0])),
        ("a2", format!("{:e}", a[1])),
        ("b2", format!("{:e}", b[1])),
    ];
    if let Some(alpha) = filter.alpha(args.k1.max(args.k2)) {
        p.push(("alpha", format!("{alpha:e}")));
    }
    let mut rows = Vec::with_capacity(args.at1.len() * args.at2.len());
    for &x1 in &args.at1 {
        for &x2 in &args.at2 {
            rows.push([num(x1), num(x2), num(e.filtered_cdf_2d(&filter, x1, x2)?)]);
        }
    }
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["x1", "x2", "value"])?;
    for r in &rows {
        out.row(r)?;
    }
    out.finish()
}

pub fn bounds(args: &BoundsArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let report = verify_bounds(&filter, &args.k, args.grid)?;
    let p = vec![
        ("filter", filter.to_string()),
        ("K", join(&args.k)),
        ("grid", args.grid.to_string()),
    ];
    let mut out = CsvOut::create(
        args.out.output.as_deref(),
        argv,
        &p,
        &["K", "x", "abs_K1", "bound", "admissible"],
    )?;
    for s in &report.samples {
        out.row(&[
            s.k.to_string(),
            num(s.x),
            num(s.abs_k1),
            num(s.bound),
            s.admissible.to_string(),
        ])?;
    }
    out.finish()?;
    let summary = format!(
        "bounds: filter={filter} points={} violations={} skipped={} worst_ratio={:.3e} max_slack={:.3e}",
        report.samples.len(),
        report.violations.len(),
        report.skipped,
        report.worst_ratio,
        report.max_slack
    );
    eprintln!("{summary}");
    if let Some(v) = report.violations.first() {
        return Err(CliError::BoundViolation(format!(
            "{} violations; first at K = {}, x = {:e}: |K1| = {:e} > bound {:e}",
            report.violations.len(),
            v.k,
            v.x,
            v.abs_k1,
            v.bound
        )));
    }
    Ok(())
}

pub fn trace(args: &TraceArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let points = convergence_trace(&filter, args.at, &args.k)?;
    let p = vec![("filter", filter.to_string()), ("x", format!("{:e}", args.at))];
    let mut out = CsvOut::create(
        args.out.output.as_deref(),
        argv,
        &p,
        &["K", "abs_K1", "bound", "admissible"],
    )?;
    for t in &points {
        out.row(&[t.k.to_string(), num(t.abs_k1), num(t.bound), t.admissible.to_string()])?;
    }
    out.finish()
}

/// CDF just past each count, and the recovered mass at it.
fn lattice_rows(e: &CosExpansion, filter: &FilterSpec, support: &[f64], dx: f64) -> CliResult<Vec<[String; 3]>> {
    let b = e.b();
    let xs: Vec<f64> = support.iter().map(|n| (n + 0.5).min(b)).collect();
    let cdf = e.filtered_cdf_many(filter, &xs)?;
    let pmf = e.recover_pmf(filter, support, dx)?;
    Ok(support
        .iter()
        .zip(cdf.iter().zip(&pmf))
        .map(|(n, (c, q))| [format!("{n}"), num(*c), num(*q)])
        .collect())
}

pub fn hawkes(args: &AppArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter()?;
    let m = load(&args.model.model)?;
    let Model::Hawkes(h) = &m.model else {
        return Err(CliError::Validation(format!(
            "hawkes: model type must be hawkes, got {}",
            m.model.type_name()
        )));
    };
    let inv = prepare(&args.model, &m)?;
    let support = integer_support(inv.a, inv.b, h.count_t as f64);
    if support.is_empty() {
        return Err(CliError::Validation(
            "hawkes: no integer counts inside the range".into(),
        ));
    }
    let e = sample_coefficients(&*inv.cf, inv.a, inv.b, args.k)?;
    let rows = lattice_rows(&e, &filter, &support, args.dx)?;
    let mut p = base_params(&args.model.model, &m, &filter, args.k);
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    p.push(("steps", args.model.steps.to_string()));
    p.push(("dx", format!("{:e}", args.dx)));
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["n", "cdf", "pmf"])?;
    for r in &rows {
        out.row(r)?;
    }
    out.finish()
}

pub fn gpb(args: &GpbArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model.model)?;
    let Model::Gpb(g) = &m.model else {
        return Err(CliError::Validation(format!(
            "gpb: model type must be gpb or pb, got {}",
            m.model.type_name()
        )));
    };
    let inv = prepare(&args.model, &m)?;
    let e = sample_coefficients(&*inv.cf, inv.a, inv.b, args.k)?;
    let mut p = base_params(&args.model.model, &m, &filter, args.k);
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    if g.is_integer_valued() {
        let (lo, hi) = g.hull();
        let support: Vec<f64> = (lo.round() as i64..=hi.round() as i64)
            .map(|n| n as f64)
            .filter(|n| *n > inv.a && *n < inv.b)
            .collect();
        if support.is_empty() {
            return Err(CliError::Validation(
                "gpb: no integer support points inside the range".into(),
            ));
        }
        let dx = 0.25 * (support[0] - inv.a).min(inv.b - support[support.len() - 1]).min(1.0);
        let rows = lattice_rows(&e, &filter, &support, dx)?;
        p.push(("dx", format!("{dx:e}")));
        let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["n", "cdf", "pmf"])?;
        for r in &rows {
            out.row(r)?;
        }
        out.finish()
    } else {
        let xs = interior(inv.a, inv.b, args.grid);
        let cdf = e.filtered_cdf_many(&filter, &xs)?;
        p.push(("grid", args.grid.to_string()));
        let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, &["x", "cdf"])?;
        for (x, c) in xs.iter().zip(&cdf) {
            out.row(&[num(*x), num(*c)])?;
        }
        out.finish()
    }
}

/// Exact law of a finite model: the atoms themselves, or the GPB law by
/// enumeration (small N) or convolution.
fn exact_law(model: &Model, merge_tol: f64) -> CliResult<Option<DiscreteDist>> {
    Ok(match model {
        Model::Discrete(d) => Some(d.clone()),
        Model::Gpb(g) if g.n() <= ENUMERATION_LIMIT => Some(gpb_enumerate(g)?),
        Model::Gpb(g) => Some(gpb_convolve(g, merge_tol)?),
        _ => None,
    })
}

fn mass_at(sorted: &[f64], x: f64) -> f64 {
    let tol = 1e-12 * x.abs().max(1.0);
    let lo = sorted.partition_point(|s| *s < x - tol);
    let hi = sorted.partition_point(|s| *s <= x + tol);
    (hi - lo) as f64 / sorted.len() as f64
}

fn raw_moment(samples: &[f64], q: u32) -> f64 {
    let n = samples.len() as f64;
    samples.iter().map(|s| s.powi(q as i32)).sum::<f64>() / n
}

pub fn oracle(args: &OracleArgs, argv: &[String]) -> CliResult<()> {
    let m = load(&args.model)?;
    if matches!(m.model, Model::Discrete2D(_)) {
        return Err(CliError::Validation(
            "oracle: bivariate models are not supported".into(),
        ));
    }
    let law = match args.method {
        Method::Exact => exact_law(&m.model, args.merge_tol)?,
        Method::Mc => None,
    };
    let needs_points = |what: &str| -> CliResult<Vec<f64>> {
        if !args.at.is_empty() {
            return Ok(args.at.clone());
        }
        match &law {
            Some(d) if what == "pmf" => Ok(d.points().to_vec()),
            _ => Err(CliError::Validation(format!("oracle {what}: --at is required"))),
        }
    };

    let mut p = vec![
        ("model", args.model.display().to_string()),
        ("type", m.model.type_name().to_string()),
        ("method", format!("{:?}", args.method).to_lowercase()),
        ("quantity", format!("{:?}", args.quantity).to_lowercase()),
    ];
    let (columns, rows): (&[&str], Vec<[String; 2]>) = match args.method {
        Method::Exact => {
            let rows = match (args.quantity, &law, &m.model) {
                (Quantity::Cdf, Some(d), _) => {
                    let f = ExactCdf::new(d);
                    needs_points("cdf")?
                        .iter()
                        .map(|x| [num(*x), num(f.eval(*x))])
                        .collect()
                }
                (Quantity::Pmf, Some(d), _) => {
                    let pts = needs_points("pmf")?;
                    pts.iter()
                        .map(|x| {
                            let i = d.points().partition_point(|s| *s < x - 1e-12 * x.abs().max(1.0));
                            let hit = i < d.len() && (d.points()[i] - x).abs() <= 1e-12 * x.abs().max(1.0);
                            [num(*x), num(if hit { d.probs()[i] } else { 0.0 })]
                        })
                        .collect()
                }
                (Quantity::Moment, Some(d), _) => args
                    .q
                    .iter()
                    .map(|&q| [q.to_string(), num(exact_moment(d, q))])
                    .collect(),
                (Quantity::Moment, None, Model::Hawkes(h)) => {
                    if args.q.iter().any(|&q| q != 1) {
                        return Err(CliError::Validation(
                            "oracle: the exact Hawkes oracle only covers q = 1".into(),
                        ));
                    }
                    p.push(("steps", args.steps.to_string()));
                    vec![["1".to_string(), num(h.mean_count_ode(args.steps)?)]]
                }
                _ => {
                    return Err(CliError::Validation(
                        format!(
                            "oracle: no exact {:?} oracle for {} models; use --method mc",
                            args.quantity,
                            m.model.type_name()
                        )
                        .to_lowercase(),
                    ))
                }
            };
            let cols: &[&str] = if args.quantity == Quantity::Moment {
                &["q", "value"]
            } else {
                &["x", "value"]
            };
            (cols, rows)
        }
        Method::Mc => {
            let discrete_sampler;
            let sampler: &dyn Sampler = match &m.model {
                Model::Discrete(d) => {
                    discrete_sampler = DiscreteSampler::new(d);
                    &discrete_sampler
                }
                Model::Gpb(g) => g,
                Model::Hawkes(h) => h,
                Model::Discrete2D(_) => unreachable!("rejected above"),
            };
            p.push(("paths", args.paths.to_string()));
            p.push(("seed", args.seed.to_string()));
            if args.paths == 0 {
                return Err(CliError::Validation("oracle: --paths must be positive".into()));
            }
            match args.quantity {
                Quantity::Cdf => {
                    let xs = needs_points("cdf")?;
                    let mc = monte_carlo_cdf(sampler, args.paths, &xs, args.seed)?;
                    p.push(("std_err", format!("{:e}", mc.std_err)));
                    (
                        &["x", "value"],
                        xs.iter().zip(&mc.cdf).map(|(x, v)| [num(*x), num(*v)]).collect(),
                    )
                }
                Quantity::Pmf => {
                    let xs = needs_points("pmf")?;
                    let mut s = monte_carlo_samples(sampler, args.paths, args.seed);
                    s.sort_by(f64::total_cmp);
                    (
                        &["x", "value"],
                        xs.iter().map(|x| [num(*x), num(mass_at(&s, *x))]).collect(),
                    )
                }
                Quantity::Moment => {
                    let s = monte_carlo_samples(sampler, args.paths, args.seed);
                    (
                        &["q", "value"],
                        args.q
                            .iter()
                            .map(|&q| [q.to_string(), num(raw_moment(&s, q))])
                            .collect(),
                    )
                }
            }
        }
    };
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, columns)?;
    for r in &rows {
        out.row(r)?;
    }
    out.finish()
}

pub fn convergence(args: &ConvergenceArgs, argv: &[String]) -> CliResult<()> {
    let filter = args.filter.resolve()?;
    let m = load(&args.model.model)?;
    if args.k.is_empty() {
        return Err(CliError::Validation("convergence: -K needs at least one value".into()));
    }
    let inv = prepare(&args.model, &m)?;
    let k_max = *args.k.iter().max().expect("nonempty");
    let law = exact_law(&m.model, 1e-9)?;
    let full = sample_coefficients(&*inv.cf, inv.a, inv.b, k_max)?;

    let mut p = base_params(&args.model.model, &m, &filter, k_max);
    p[2] = ("K", join(&args.k));
    range_params(&mut p, &inv.rule, inv.a, inv.b);
    steps_param(&mut p, &m, args.model.steps);

    let mut rows: Vec<[String; 5]> = Vec::new();
    let columns: &[&str] = match args.quantity {
        Quantity::Cdf => {
            if args.at.is_empty() {
                return Err(CliError::Validation("convergence: --at is required for cdf".into()));
            }
            let Some(d) = &law else {
                return Err(CliError::Validation(format!(
                    "convergence: no exact cdf for {} models",
                    m.model.type_name()
                )));
            };
            let exact = ExactCdf::new(d);
            for &k in &args.k {
                let e = full.truncated(k)?;
                for &x in &args.at {
                    let v = e.filtered_cdf(&filter, x)?;
                    let t = exact.eval(x);
                    rows.push([k.to_string(), num(x), num(v), num(t), num((v - t).abs())]);
                }
            }
            &["K", "x", "value", "exact", "abs_error"]
        }
        Quantity::Moment => {
            let exact: Vec<f64> = match (&law, &m.model) {
                (Some(d), _) => args.q.iter().map(|&q| exact_moment(d, q)).collect(),
                (None, Model::Hawkes(h)) if args.q.iter().all(|&q| q == 1) => {
                    vec![h.mean_count_ode(args.model.steps)?; args.q.len()]
                }
                _ => {
                    return Err(CliError::Validation(format!(
                        "convergence: no exact moment for {} models at these orders",
                        m.model.type_name()
                    )))
                }
            };
            for &k in &args.k {
                let e = full.truncated(k)?;
                for (&q, &t) in args.q.iter().zip(&exact) {
                    let v = e.cos_moment(&filter, q);
                    rows.push([k.to_string(), q.to_string(), num(v), num(t), num((v - t).abs())]);
                }
            }
            &["K", "q", "value", "exact", "abs_error"]
        }
        Quantity::Pmf => {
            return Err(CliError::Validation(
                "convergence: --quantity must be cdf or moment".into(),
            ))
        }
    };
    let mut out = CsvOut::create(args.out.output.as_deref(), argv, &p, columns)?;
    for r in &rows {
        out.row(r)?;
    }
    out.finish()
}

fn join(ks: &[usize]) -> String {
    ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}
