use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use provar_core::cloud::PointCloud;
use provar_core::fit::{select_degree, DegreeSelection, DegreeSummary};
use provar_core::measure::{
    normalize, validate_density_with_tolerance, BoundingBox, Density, DensityFn, ProbabilisticPair,
    QuadratureSpec,
};
use provar_core::poly::{bernstein_approx, truncated_series, SeriesFamily, SeriesSpec};
use provar_core::stats::{covariance, CovarianceReport};
use provar_core::topology::{
    build_rips_with_budget, compute_persistence, default_max_scale, persistent_betti_summary,
    PersistenceDiagram,
};
use provar_core::variety::{
    builtin_variety, default_proposal_cap, default_sigma, sample_parametric, sample_thickened,
    BuiltinVariety, ImplicitVariety, ThickenedDensity,
};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::spec::{parse_density, parse_function, parse_series_family, read_poly};
use crate::svg;

struct Context {
    out_dir: PathBuf,
    seed: u64,
    verbose: bool,
}

impl Context {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("provar: {}", msg.as_ref());
        }
    }

    fn out_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_owned()
        } else {
            self.out_dir.join(p)
        }
    }

    fn write(&self, p: &Path, contents: &[u8]) -> Result<PathBuf> {
        let path = self.out_path(p);
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        fs::write(&path, contents).map_err(io)?;
        self.log(format!("wrote {}", path.display()));
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, p: &Path, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(p, text.as_bytes())
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Context {
        out_dir: cli.out_dir,
        seed: cli.seed.unwrap_or(0),
        verbose: cli.verbose,
    };
    match cli.command {
        Command::Sample(a) => sample(&ctx, a),
        Command::Normalize(a) => normalize_cmd(&ctx, a),
        Command::Validate(a) => validate(&ctx, a),
        Command::Approx(a) => approx(&ctx, a),
        Command::Covariance(a) => covariance_cmd(&ctx, a),
        Command::Persist(a) => persist(&ctx, a),
        Command::Fit(a) => fit(&ctx, a),
        Command::Pipeline(a) => pipeline(&ctx, a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let file = fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    PointCloud::read_csv(file).map_err(|source| CliError::ReadCloud {
        path: path.to_owned(),
        source,
    })
}

fn parse_box(s: &str) -> Result<BoundingBox> {
    s.parse()
        .map_err(|e: provar_core::measure::MeasureError| CliError::invalid("--box", e.to_string()))
}

// ---- sampling ----

fn builtin(args: &VarietyArgs) -> Result<Option<BuiltinVariety>> {
    let Some(name) = args.variety else {
        return Ok(None);
    };
    let which = match name {
        VarietyName::Torus => {
            let (major, minor) = (args.major, args.minor.unwrap_or(0.5));
            if !(minor > 0.0 && major > minor && major.is_finite()) {
                return Err(CliError::invalid(
                    "--R/--r",
                    format!("torus requires R > r > 0, got R = {major}, r = {minor}"),
                ));
            }
            BuiltinVariety::Torus { major, minor }
        }
        VarietyName::Sphere => {
            let radius = args.minor.unwrap_or(1.0);
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(CliError::invalid(
                    "--r",
                    format!("sphere requires r > 0, got r = {radius}"),
                ));
            }
            BuiltinVariety::Sphere { radius }
        }
        VarietyName::Elliptic => BuiltinVariety::Elliptic,
    };
    Ok(Some(which))
}

fn check_sampling(args: &VarietyArgs) -> Result<()> {
    if args.n == 0 {
        return Err(CliError::invalid("--n", "need n >= 1"));
    }
    if let Some(s) = args.sigma {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::invalid(
                "--sigma",
                format!("need sigma > 0, got {s}"),
            ));
        }
    }
    if args.cap == Some(0) {
        return Err(CliError::invalid("--cap", "need cap >= 1"));
    }
    Ok(())
}

fn draw(
    ctx: &Context,
    args: &VarietyArgs,
    which: Option<BuiltinVariety>,
    implicit: Option<ImplicitVariety>,
) -> Result<PointCloud> {
    match args.mode {
        Mode::Parametric => {
            let which = which.ok_or_else(|| {
                CliError::invalid(
                    "--mode",
                    "parametric sampling needs a built-in --variety; use --mode thickened for --poly",
                )
            })?;
            ctx.log(format!("sampling {} points on {}", args.n, which.name()));
            Ok(sample_parametric(which, args.n, ctx.seed)?)
        }
        Mode::Thickened => {
            let variety = match (which, implicit) {
                (Some(w), _) => builtin_variety(w)?,
                (None, Some(v)) => v,
                (None, None) => {
                    return Err(CliError::invalid(
                        "--variety",
                        "a variety or --poly is required",
                    ))
                }
            };
            let sigma = args.sigma.unwrap_or_else(|| default_sigma(&variety));
            let td = ThickenedDensity::new(variety, sigma)?;
            let cap = args.cap.unwrap_or_else(|| default_proposal_cap(args.n));
            ctx.log(format!(
                "rejection sampling {} points, sigma {sigma}",
                args.n
            ));
            Ok(sample_thickened(&td, args.n, ctx.seed, cap)?)
        }
    }
}

fn write_cloud(ctx: &Context, cloud: &PointCloud, out: &Path) -> Result<()> {
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf)?;
    ctx.write(out, &buf)?;
    ctx.write_json(&out.with_extension("provenance.json"), &cloud.provenance)?;
    Ok(())
}

fn sample(ctx: &Context, args: SampleArgs) -> Result<()> {
    check_sampling(&args.variety)?;
    let which = builtin(&args.variety)?;
    let implicit = match &args.poly {
        Some(path) => {
            let bbox = args
                .bbox
                .as_deref()
                .ok_or_else(|| CliError::invalid("--box", "required with --poly"))?;
            let bbox = parse_box(bbox)?;
            let poly = read_poly(path)?;
            let name = path.display().to_string();
            Some(
                ImplicitVariety::new(name, poly, bbox)
                    .map_err(|e| CliError::invalid("--poly", e.to_string()))?,
            )
        }
        None if which.is_none() => {
            return Err(CliError::invalid(
                "--variety",
                "one of --variety or --poly is required",
            ))
        }
        None => None,
    };
    let cloud = draw(ctx, &args.variety, which, implicit)?;
    write_cloud(ctx, &cloud, &args.out)?;
    if let Some(p) = &args.svg {
        ctx.write(p, svg::cloud_projection(&cloud).as_bytes())?;
    }
    Ok(())
}

// ---- densities ----

fn density_pair_inputs(
    ctx: &Context,
    args: &DensityArgs,
) -> Result<(DensityFn, BoundingBox, QuadratureSpec)> {
    let bbox = parse_box(&args.bbox)?;
    let density = parse_density(&args.density, bbox.dim())?;
    if density.nvars() != bbox.dim() {
        return Err(CliError::invalid(
            "--box",
            format!(
                "density has {} variable(s) but the box has {} axis/axes",
                density.nvars(),
                bbox.dim()
            ),
        ));
    }
    let quad = match &args.quad {
        Some(q) => QuadratureSpec::parse_with_seed(q, ctx.seed)
            .map_err(|e| CliError::invalid("--quad", e.to_string()))?,
        None => QuadratureSpec::default_for(&density, ctx.seed),
    };
    Ok((density, bbox, quad))
}

fn normalize_cmd(ctx: &Context, args: NormalizeArgs) -> Result<()> {
    let (density, bbox, quad) = density_pair_inputs(ctx, &args.density)?;
    let pair = normalize(density, bbox, quad)?;
    print_json(&pair)?;
    if let Some(out) = &args.out {
        ctx.write_json(out, &pair)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidationRecord<'a> {
    passed: bool,
    failed: Vec<String>,
    min_value: f64,
    argmin: &'a [f64],
    integral: f64,
    tolerance: f64,
    omega: f64,
    normalizer: f64,
}

fn validate(ctx: &Context, args: ValidateArgs) -> Result<()> {
    if args.grid < 2 {
        return Err(CliError::invalid(
            "--grid",
            format!("need grid >= 2, got {}", args.grid),
        ));
    }
    if !(args.tolerance > 0.0 && args.tolerance.is_finite()) {
        return Err(CliError::invalid(
            "--tolerance",
            format!("need tolerance > 0, got {}", args.tolerance),
        ));
    }
    let (density, bbox, quad) = density_pair_inputs(ctx, &args.density)?;
    let pair = match args.omega {
        Some(omega) => ProbabilisticPair::with_omega(density, bbox, omega, quad)
            .map_err(|e| CliError::invalid("--omega", e.to_string()))?,
        None => normalize(density, bbox, quad)?,
    };
    let report = validate_density_with_tolerance(&pair, &quad, args.grid, args.tolerance);
    let record = ValidationRecord {
        passed: report.passed(),
        failed: report.failed.iter().map(|c| c.to_string()).collect(),
        min_value: report.min_value,
        argmin: &report.argmin,
        integral: report.integral,
        tolerance: report.tolerance,
        omega: pair.omega,
        normalizer: pair.normalizer,
    };
    print_json(&record)?;
    if let Some(out) = &args.out {
        ctx.write_json(out, &record)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(record.failed.join(", ")))
    }
}

// ---- approximation ----

#[derive(Serialize)]
struct ApproxRecord {
    method: &'static str,
    nvars: usize,
    degree: usize,
    terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_sup_error: Option<f64>,
    /// Same check on the monomial form that is written out; it loses
    /// accuracy to cancellation at high degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    monomial_grid_sup_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<SeriesFamily>,
}

fn approx(ctx: &Context, args: ApproxArgs) -> Result<()> {
    let (poly, record) = match args.method {
        ApproxMethod::Bernstein => {
            if args.degree == 0 {
                return Err(CliError::invalid("--degree", "need N >= 1"));
            }
            if args.nvars == 0 {
                return Err(CliError::invalid("--nvars", "need nvars >= 1"));
            }
            let (f, nvars) = parse_function(&args.func, args.nvars)?;
            let bp = bernstein_approx(&f, nvars, args.degree)?;
            let per_axis = match nvars {
                1 => 1001,
                2 => 101,
                3 => 21,
                _ => 5,
            };
            let poly = bp.to_multipoly();
            let mut err: f64 = 0.0;
            let mut mono_err: f64 = 0.0;
            let mut idx = vec![0usize; nvars];
            let mut x = vec![0.0; nvars];
            'grid: loop {
                for (xi, &i) in x.iter_mut().zip(&idx) {
                    *xi = i as f64 / (per_axis - 1) as f64;
                }
                let exact = f(&x);
                err = err.max((bp.evaluate(&x)? - exact).abs());
                mono_err = mono_err.max((poly.eval_unchecked(&x) - exact).abs());
                for i in idx.iter_mut() {
                    *i += 1;
                    if *i < per_axis {
                        continue 'grid;
                    }
                    *i = 0;
                }
                break;
            }
            let record = ApproxRecord {
                method: "bernstein",
                nvars,
                degree: args.degree,
                terms: poly.num_terms(),
                grid_sup_error: Some(err),
                monomial_grid_sup_error: Some(mono_err),
                family: None,
            };
            (poly, record)
        }
        ApproxMethod::Series => {
            let family = parse_series_family(&args.func)?;
            let poly = truncated_series(&SeriesSpec::new(family.clone(), args.order))
                .map_err(|e| CliError::invalid("--func", e.to_string()))?;
            let record = ApproxRecord {
                method: "series",
                nvars: 1,
                degree: poly.total_degree().max(0) as usize,
                terms: poly.num_terms(),
                grid_sup_error: None,
                monomial_grid_sup_error: None,
                family: Some(family),
            };
            (poly, record)
        }
    };
    ctx.write(&args.out, poly.to_text().as_bytes())?;
    print_json(&record)
}

// ---- cloud analysis ----

fn covariance_cmd(ctx: &Context, args: CovarianceArgs) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let report = covariance(&cloud)?;
    ctx.write_json(&args.out, &report)?;
    if let Some(p) = &args.svg {
        ctx.write(p, svg::covariance_heatmap(&report).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PersistRecord<'a> {
    #[serde(flatten)]
    diagram: &'a PersistenceDiagram,
    persistence_ratio: f64,
    summary: Vec<usize>,
    simplices_by_dim: Vec<usize>,
}

struct PersistOutcome {
    diagram: PersistenceDiagram,
    summary: Vec<usize>,
    simplices_by_dim: Vec<usize>,
}

fn run_persistence(
    ctx: &Context,
    cloud: &PointCloud,
    opts: &PersistOptions,
) -> Result<PersistOutcome> {
    let max_dim = opts
        .maxdim
        .unwrap_or_else(|| cloud.dim().saturating_sub(1).min(2));
    if max_dim > 2 {
        return Err(CliError::invalid(
            "--maxdim",
            format!("must be 0, 1 or 2, got {max_dim}"),
        ));
    }
    if let Some(s) = opts.maxscale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::invalid(
                "--maxscale",
                format!("need maxscale > 0, got {s}"),
            ));
        }
    }
    if !(opts.ratio > 0.0 && opts.ratio < 1.0) {
        return Err(CliError::invalid(
            "--ratio",
            format!("need 0 < ratio < 1, got {}", opts.ratio),
        ));
    }
    if opts.budget == 0 {
        return Err(CliError::invalid("--budget", "need budget >= 1"));
    }
    let max_scale = opts.maxscale.unwrap_or_else(|| default_max_scale(cloud));
    ctx.log(format!(
        "building Rips filtration, max_dim {max_dim}, max_scale {max_scale}"
    ));
    let filt = build_rips_with_budget(cloud, max_dim, max_scale, opts.budget)?;
    ctx.log(format!("{} simplices; reducing", filt.len()));
    let diagram = compute_persistence(&filt);
    let summary = persistent_betti_summary(&diagram, opts.ratio);
    Ok(PersistOutcome {
        summary,
        simplices_by_dim: filt.counts_by_dim(),
        diagram,
    })
}

fn write_persistence(
    ctx: &Context,
    outcome: &PersistOutcome,
    ratio: f64,
    out: &Path,
) -> Result<()> {
    let record = PersistRecord {
        diagram: &outcome.diagram,
        persistence_ratio: ratio,
        summary: outcome.summary.clone(),
        simplices_by_dim: outcome.simplices_by_dim.clone(),
    };
    ctx.write_json(out, &record)?;
    Ok(())
}

fn persist(ctx: &Context, args: PersistArgs) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let outcome = run_persistence(ctx, &cloud, &args.options)?;
    write_persistence(ctx, &outcome, args.options.ratio, &args.out)?;
    if let Some(p) = &args.svg {
        ctx.write(p, svg::persistence_diagram(&outcome.diagram).as_bytes())?;
    }
    println!("persistent betti summary: {:?}", outcome.summary);
    Ok(())
}

#[derive(Serialize)]
struct FitRecord<'a> {
    degree: u32,
    converged: bool,
    residual_threshold: f64,
    nvars: usize,
    basis: &'a [Vec<u32>],
    coefficients: &'a [f64],
    residual_rms: f64,
    gram_condition: f64,
    sweep: &'a [DegreeSummary],
}

impl<'a> From<&'a DegreeSelection> for FitRecord<'a> {
    fn from(sel: &'a DegreeSelection) -> Self {
        let f = &sel.selected;
        FitRecord {
            degree: f.degree,
            converged: sel.converged,
            residual_threshold: sel.residual_threshold,
            nvars: f.nvars,
            basis: &f.basis,
            coefficients: &f.coefficients,
            residual_rms: f.residual_rms,
            gram_condition: f.gram_condition,
            sweep: &sel.sweep,
        }
    }
}

fn run_fit(cloud: &PointCloud, opts: &FitOptions) -> Result<DegreeSelection> {
    if opts.maxdeg == 0 {
        return Err(CliError::invalid("--maxdeg", "need maxdeg >= 1"));
    }
    if !(opts.threshold > 0.0 && opts.threshold.is_finite()) {
        return Err(CliError::invalid(
            "--threshold",
            format!("need threshold > 0, got {}", opts.threshold),
        ));
    }
    Ok(select_degree(cloud, opts.maxdeg, opts.threshold)?)
}

fn write_fit(ctx: &Context, sel: &DegreeSelection, out: &Path, poly_out: &Path) -> Result<()> {
    ctx.write_json(out, &FitRecord::from(sel))?;
    ctx.write(poly_out, sel.selected.to_poly().to_text().as_bytes())?;
    Ok(())
}

fn fit(ctx: &Context, args: FitArgs) -> Result<()> {
    let cloud = read_cloud(&args.input)?;
    let sel = run_fit(&cloud, &args.options)?;
    write_fit(ctx, &sel, &args.out, &args.poly_out)?;
    println!(
        "selected degree {} (residual rms {:e}, converged: {})",
        sel.selected.degree, sel.selected.residual_rms, sel.converged
    );
    Ok(())
}

// ---- pipeline ----

#[derive(Serialize)]
struct PipelineSummary<'a> {
    variety: &'static str,
    parameters: BTreeMap<String, f64>,
    mode: &'static str,
    seed: u64,
    n: usize,
    covariance: &'a CovarianceReport,
    persistence: PipelinePersistence,
    fit: PipelineFit<'a>,
    artifacts: Vec<&'static str>,
}

#[derive(Serialize)]
struct PipelinePersistence {
    max_dim: usize,
    max_scale: f64,
    persistence_ratio: f64,
    summary: Vec<usize>,
    simplices_by_dim: Vec<usize>,
}

#[derive(Serialize)]
struct PipelineFit<'a> {
    selected_degree: u32,
    converged: bool,
    residual_rms: f64,
    sweep: &'a [DegreeSummary],
}

fn pipeline(ctx: &Context, args: PipelineArgs) -> Result<()> {
    check_sampling(&args.variety)?;
    let which = builtin(&args.variety)?
        .ok_or_else(|| CliError::invalid("--variety", "pipeline needs a built-in variety"))?;
    let cloud = draw(ctx, &args.variety, Some(which), None)?;
    write_cloud(ctx, &cloud, Path::new("cloud.csv"))?;
    ctx.write(
        Path::new("cloud.svg"),
        svg::cloud_projection(&cloud).as_bytes(),
    )?;

    let cov = covariance(&cloud)?;
    ctx.write_json(Path::new("covariance.json"), &cov)?;
    ctx.write(
        Path::new("covariance.svg"),
        svg::covariance_heatmap(&cov).as_bytes(),
    )?;

    let pers = run_persistence(ctx, &cloud, &args.persist)?;
    write_persistence(
        ctx,
        &pers,
        args.persist.ratio,
        Path::new("persistence.json"),
    )?;
    ctx.write(
        Path::new("persistence.svg"),
        svg::persistence_diagram(&pers.diagram).as_bytes(),
    )?;

    let sel = run_fit(&cloud, &args.fit)?;
    write_fit(ctx, &sel, Path::new("fit.json"), Path::new("fit.poly"))?;

    let summary = PipelineSummary {
        variety: which.name(),
        parameters: which.parameters(),
        mode: match args.variety.mode {
            Mode::Parametric => "parametric",
            Mode::Thickened => "thickened",
        },
        seed: ctx.seed,
        n: cloud.len(),
        covariance: &cov,
        persistence: PipelinePersistence {
            max_dim: pers.diagram.max_dim,
            max_scale: pers.diagram.max_scale,
            persistence_ratio: args.persist.ratio,
            summary: pers.summary.clone(),
            simplices_by_dim: pers.simplices_by_dim.clone(),
        },
        fit: PipelineFit {
            selected_degree: sel.selected.degree,
            converged: sel.converged,
            residual_rms: sel.selected.residual_rms,
            sweep: &sel.sweep,
        },
        artifacts: vec![
            "cloud.csv",
            "cloud.provenance.json",
            "cloud.svg",
            "covariance.json",
            "covariance.svg",
            "persistence.json",
            "persistence.svg",
            "fit.json",
            "fit.poly",
            "summary.json",
        ],
    };
    ctx.write_json(Path::new("summary.json"), &summary)?;
    println!(
        "{}: persistent betti summary {:?}, selected degree {}",
        which.name(),
        pers.summary,
        sel.selected.degree
    );
    Ok(())
}
