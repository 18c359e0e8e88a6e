//! `addilope`: closures, property checks and scenario runs from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use addilope_core::funcspec::catalog::catalog_entry;
use addilope_core::grid::csv::write_table;
use addilope_core::props::{
    check_aggregation, check_coordinatewise_concave, check_coordinatewise_convex,
    check_directionally_concave, check_directionally_convex, check_dominated, check_linear,
    check_midpoint_convex, check_ratio_monotone, check_subadditive, check_submodular,
    check_superadditive, check_supermodular, check_zero_origin, Ray,
};
use addilope_core::scalar::parse_rational;
use addilope_core::theorems::{
    lemma_suite, reproduce_example1, screen_pair, verify_fixed_point, verify_linear_dual,
    write_summary,
};
use addilope_core::transforms::{axis_slope_estimate, transform_with_refinement, SlopeOptions};
use addilope_core::{
    sample, CheckReport, Exact, FuncSpec, GridFn, GridSpec, Kind, Limits, Params, PlSpec, PointFn,
    Property, RefinementConfig, Scalar, TheoremReport, TheoremVerdict, Tolerance,
};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

const EXIT_ERROR: u8 = 1;
const EXIT_DIVERGED: u8 = 2;
const EXIT_PROPERTY_FAILS: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "addilope",
    version,
    about = "Super- and sub-additive transforms of aggregation functions on grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a closure on a grid and its refinements.
    Transform(TransformArgs),
    /// Check one property of a sampled function.
    Check(CheckArgs),
    /// Run a scenario and report its verdict.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct Source {
    /// Expression in x1..xn.
    #[arg(long = "fn", value_name = "EXPR")]
    expr: Option<String>,
    /// Piecewise-linear function as a JSON file.
    #[arg(long, value_name = "FILE")]
    pl: Option<PathBuf>,
    /// Catalog function name.
    #[arg(long, value_name = "NAME")]
    catalog: Option<String>,
    /// Catalog parameter `key=value`, repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Number of variables.
    #[arg(long)]
    n: Option<usize>,
    /// Step per axis, one value or a comma list.
    #[arg(long, value_name = "H", default_value = "1")]
    step: String,
    /// Points per axis beyond the origin, one value or a comma list.
    #[arg(long, value_name = "M", default_value = "8")]
    count: String,
}

#[derive(Args, Clone)]
struct Numeric {
    /// Use exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Absolute comparison tolerance.
    #[arg(long, conflicts_with = "rel_tol")]
    tol: Option<f64>,
    /// Tolerance relative to `1 + max|value|`.
    #[arg(long)]
    rel_tol: Option<f64>,
}

impl Numeric {
    fn tolerance(&self) -> Tolerance {
        match (self.tol, self.rel_tol) {
            (Some(t), _) => Tolerance::Absolute(t),
            (None, Some(r)) => Tolerance::Relative(r),
            (None, None) => Tolerance::Default,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Super,
    Sub,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Super => Kind::Super,
            KindArg::Sub => Kind::Sub,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    numeric: Numeric,
    /// Number of grids, each halving the previous step.
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Directory receiving `level<l>.csv` and `closure.json`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// What to print on standard output.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Property id.
    #[arg(long)]
    prop: String,
    #[arg(long)]
    strict: bool,
    /// Ray for the ratio check: an axis number or `diag`.
    #[arg(long, default_value = "diag")]
    ray: String,
    #[command(flatten)]
    source: Source,
    /// Upper function for `dominated`, as an expression.
    #[arg(long, value_name = "EXPR")]
    g: Option<String>,
    /// Upper function for `dominated`, from the catalog.
    #[arg(long, value_name = "NAME")]
    g_catalog: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    numeric: Numeric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Example1,
    FixedPoint,
    LinearDual,
    Lemmas,
    Screen,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    scenario: ScenarioArg,
    #[command(flatten)]
    source: Source,
    /// Lower function for `screen`, as an expression.
    #[arg(long, value_name = "EXPR")]
    f: Option<String>,
    /// Upper function for `screen`, as an expression.
    #[arg(long, value_name = "EXPR")]
    g: Option<String>,
    #[arg(long, value_name = "NAME")]
    f_catalog: Option<String>,
    #[arg(long, value_name = "NAME")]
    g_catalog: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    numeric: Numeric,
    /// Refinement levels for `linear-dual`.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Also write a one-row CSV summary.
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

/// A resolved function together with its catalog name, if any.
struct Resolved {
    name: Option<String>,
    body: FuncSpec,
    arity: usize,
}

fn params_of(source: &Source) -> Result<Params> {
    let mut params = Params::default();
    for p in &source.params {
        params.push_assignment(p)?;
    }
    Ok(params)
}

fn resolve(source: &Source, n: Option<usize>) -> Result<Resolved> {
    let given = [
        source.expr.is_some(),
        source.pl.is_some(),
        source.catalog.is_some(),
    ];
    match given.iter().filter(|b| **b).count() {
        0 => bail!("a function is required: use --fn, --pl or --catalog"),
        1 => {}
        _ => bail!("--fn, --pl and --catalog are mutually exclusive"),
    }
    if !source.params.is_empty() && source.catalog.is_none() {
        bail!("--param applies to catalog functions only");
    }
    if let Some(text) = &source.expr {
        let arity = n.unwrap_or(1);
        let body =
            FuncSpec::parse(text, arity).with_context(|| format!("cannot parse '{text}'"))?;
        return Ok(Resolved {
            name: None,
            body,
            arity,
        });
    }
    if let Some(path) = &source.pl {
        if n.is_some_and(|n| n != 1) {
            bail!("piecewise-linear functions take one variable");
        }
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let pl = PlSpec::from_json(&text)
            .with_context(|| format!("invalid piecewise-linear file {}", path.display()))?;
        return Ok(Resolved {
            name: None,
            body: FuncSpec::Pl(pl),
            arity: 1,
        });
    }
    let name = source.catalog.as_deref().unwrap_or_default();
    let entry = catalog_entry(name, &params_of(source)?, n)?;
    Ok(Resolved {
        name: Some(entry.name),
        body: entry.body,
        arity: entry.arity,
    })
}

fn expand<V: Clone>(
    text: &str,
    n: usize,
    what: &str,
    parse: impl Fn(&str) -> Option<V>,
) -> Result<Vec<V>> {
    let items: Vec<V> = text
        .split(',')
        .map(|t| parse(t.trim()).ok_or_else(|| anyhow!("invalid {what} '{}'", t.trim())))
        .collect::<Result<_>>()?;
    match items.len() {
        1 => Ok(vec![items[0].clone(); n]),
        k if k == n => Ok(items),
        k => bail!("{k} values given for --{what}, expected 1 or {n}"),
    }
}

fn grid_spec(grid: &GridArgs, arity: usize, limits: &Limits) -> Result<GridSpec> {
    let steps = expand(&grid.step, arity, "step", parse_rational)?;
    let counts = expand(&grid.count, arity, "count", |t| t.parse::<usize>().ok())?;
    let spec = GridSpec::new(steps, counts)?;
    spec.check_size(limits)?;
    Ok(spec)
}

fn require_rational(f: &FuncSpec, exact: bool) -> Result<()> {
    if exact && !f.is_rational() {
        bail!("--exact needs a function that stays within the rationals; '{f}' does not");
    }
    Ok(())
}

fn to_json<S: Serialize>(value: &S) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

fn transform(args: &TransformArgs) -> Result<u8> {
    let limits = Limits::from_env();
    let f = resolve(&args.source, args.grid.n)?;
    require_rational(&f.body, args.numeric.exact)?;
    let spec = grid_spec(&args.grid, f.arity, &limits)?;
    if args.numeric.exact {
        transform_as::<Exact>(args, &f, &spec, limits)
    } else {
        transform_as::<f64>(args, &f, &spec, limits)
    }
}

fn transform_as<T: Scalar>(
    args: &TransformArgs,
    f: &Resolved,
    spec: &GridSpec,
    limits: Limits,
) -> Result<u8> {
    let kind = Kind::from(args.kind);
    let config = RefinementConfig {
        limits,
        ..RefinementConfig::with_levels(args.levels)
    };
    let result = transform_with_refinement::<T, _>(&f.body, spec, kind, &config)?;
    let slope = axis_slope_estimate::<T, _>(&f.body, spec, &SlopeOptions::default()).ok();
    let json = to_json(&result.to_json(slope.as_ref()))?;
    let bounds = match f.name.as_deref() {
        Some("example1_A") => Some((
            catalog_entry("example1_f", &Params::default(), None)?.body,
            catalog_entry("example1_g", &Params::default(), None)?.body,
        )),
        _ => None,
    };
    let column = match kind {
        Kind::Super => "Astar",
        Kind::Sub => "Asub",
    };
    let mut tables = Vec::with_capacity(result.levels.len());
    for level in &result.levels {
        let mut buf = Vec::new();
        let sampled = match &bounds {
            Some((lo, hi)) => Some((
                sample::<T, _>(lo, &level.spec)?,
                sample::<T, _>(hi, &level.spec)?,
            )),
            None => None,
        };
        let mut columns: Vec<(&str, &GridFn<T>)> =
            vec![("A", &level.input), (column, &level.output)];
        if let Some((lo, hi)) = &sampled {
            columns.push(("f", lo));
            columns.push(("g", hi));
        }
        write_table(&columns, &mut buf)?;
        tables.push(buf);
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (l, table) in tables.iter().enumerate() {
            write_file(&dir.join(format!("level{l}.csv")), table)?;
        }
        write_file(&dir.join("closure.json"), format!("{json}\n").as_bytes())?;
    }
    match args.format {
        Format::Json => print(&json)?,
        Format::Csv => {
            let last = tables.last().map(Vec::as_slice).unwrap_or_default();
            std::io::stdout().lock().write_all(last)?;
        }
    }
    Ok(if result.divergence_flag {
        EXIT_DIVERGED
    } else {
        0
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn parse_ray(text: &str, arity: usize) -> Result<Ray> {
    if text.eq_ignore_ascii_case("diag") || text.eq_ignore_ascii_case("diagonal") {
        return Ok(Ray::Diagonal);
    }
    let axis: usize = text
        .trim_start_matches('x')
        .parse()
        .map_err(|_| anyhow!("invalid ray '{text}': use an axis number 1..{arity} or 'diag'"))?;
    if axis == 0 || axis > arity {
        bail!("ray axis {axis} is outside 1..{arity}");
    }
    Ok(Ray::Axis(axis - 1))
}

fn check(args: &CheckArgs) -> Result<u8> {
    let property: Property = args.prop.parse()?;
    let limits = Limits::from_env();
    let f = resolve(&args.source, args.grid.n)?;
    let spec = grid_spec(&args.grid, f.arity, &limits)?;
    let upper = match property {
        Property::Dominated => {
            let source = match (&args.g, &args.g_catalog) {
                (Some(e), None) => Source {
                    expr: Some(e.clone()),
                    ..Source::default()
                },
                (None, Some(c)) => Source {
                    catalog: Some(c.clone()),
                    params: args.source.params.clone(),
                    ..Source::default()
                },
                _ => bail!("'dominated' needs exactly one of --g or --g-catalog"),
            };
            Some(resolve(&source, Some(f.arity))?.body)
        }
        _ => {
            if args.g.is_some() || args.g_catalog.is_some() {
                bail!("--g and --g-catalog apply to the 'dominated' property only");
            }
            None
        }
    };
    let ray = parse_ray(&args.ray, f.arity)?;
    require_rational(&f.body, args.numeric.exact)?;
    if let Some(g) = &upper {
        require_rational(g, args.numeric.exact)?;
    }
    let tol = args.numeric.tolerance();
    let holds = if args.numeric.exact {
        run_check::<Exact>(
            property,
            args.strict,
            ray,
            tol,
            &f.body,
            upper.as_ref(),
            &spec,
        )?
    } else {
        run_check::<f64>(
            property,
            args.strict,
            ray,
            tol,
            &f.body,
            upper.as_ref(),
            &spec,
        )?
    };
    Ok(if holds { 0 } else { EXIT_PROPERTY_FAILS })
}

fn run_check<T: Scalar>(
    property: Property,
    strict: bool,
    ray: Ray,
    tol: Tolerance,
    f: &FuncSpec,
    upper: Option<&FuncSpec>,
    spec: &GridSpec,
) -> Result<bool> {
    let a: GridFn<T> = sample(f, spec)?;
    let report: CheckReport<T> = match property {
        Property::Aggregation => check_aggregation(&a, tol),
        Property::Superadditive => check_superadditive(&a, strict, tol),
        Property::Subadditive => check_subadditive(&a, strict, tol),
        Property::CoordinatewiseConvex => check_coordinatewise_convex(&a, strict, tol),
        Property::CoordinatewiseConcave => check_coordinatewise_concave(&a, strict, tol),
        Property::Supermodular => check_supermodular(&a, strict, tol),
        Property::Submodular => check_submodular(&a, strict, tol),
        Property::DirectionallyConvex => check_directionally_convex(&a, strict, tol),
        Property::DirectionallyConcave => check_directionally_concave(&a, strict, tol),
        Property::Linear => check_linear(&a, tol),
        Property::RatioMonotone => check_ratio_monotone(&a, ray, strict, tol),
        Property::MidpointConvex => check_midpoint_convex(&a, strict, tol),
        Property::ZeroOrigin => check_zero_origin(&a, tol),
        Property::Dominated => {
            let g: GridFn<T> = sample(
                upper.ok_or_else(|| anyhow!("missing upper function"))?,
                spec,
            )?;
            check_dominated(&a, &g, tol)?
        }
    };
    print(&to_json(&report)?)?;
    Ok(report.holds())
}

fn verify(args: &VerifyArgs) -> Result<u8> {
    let limits = Limits::from_env();
    let tol = args.numeric.tolerance();
    if args.scenario != ScenarioArg::Screen
        && (args.f.is_some()
            || args.g.is_some()
            || args.f_catalog.is_some()
            || args.g_catalog.is_some())
    {
        bail!("--f, --g, --f-catalog and --g-catalog apply to the 'screen' scenario only");
    }
    match args.scenario {
        ScenarioArg::Example1 => {
            let (step, count) = uniform_grid(&args.grid)?;
            let spec = GridSpec::uniform(1, step.clone(), count)?;
            spec.check_size(&limits)?;
            emit_theorem(&reproduce_example1(&step, count)?, args.summary.as_deref())
        }
        ScenarioArg::FixedPoint | ScenarioArg::LinearDual => {
            let f = resolve(&args.source, args.grid.n)?;
            require_rational(&f.body, args.numeric.exact)?;
            let spec = grid_spec(&args.grid, f.arity, &limits)?;
            let linear_dual = args.scenario == ScenarioArg::LinearDual;
            if linear_dual {
                let finest = (1..args.levels).try_fold(spec.clone(), |s, _| s.refine(&limits))?;
                finest.check_size(&limits)?;
            }
            match (args.numeric.exact, linear_dual) {
                (true, false) => emit_theorem(
                    &verify_fixed_point::<Exact>(&f.body, &spec, tol)?,
                    args.summary.as_deref(),
                ),
                (false, false) => emit_theorem(
                    &verify_fixed_point::<f64>(&f.body, &spec, tol)?,
                    args.summary.as_deref(),
                ),
                (true, true) => emit_theorem(
                    &verify_linear_dual::<Exact>(&f.body, &spec, args.levels, tol)?,
                    args.summary.as_deref(),
                ),
                (false, true) => emit_theorem(
                    &verify_linear_dual::<f64>(&f.body, &spec, args.levels, tol)?,
                    args.summary.as_deref(),
                ),
            }
        }
        ScenarioArg::Lemmas => {
            let (step, count) = uniform_grid(&args.grid)?;
            let fns: Vec<(String, FuncSpec)> = if args.source.expr.is_none()
                && args.source.pl.is_none()
                && args.source.catalog.is_none()
            {
                addilope_core::funcspec::catalog::standard_entries()
                    .into_iter()
                    .filter(|e| !args.numeric.exact || e.body.is_rational())
                    .map(|e| (e.name, e.body))
                    .collect()
            } else {
                let f = resolve(&args.source, args.grid.n)?;
                let label = f.name.clone().unwrap_or_else(|| f.body.to_string());
                vec![(label, f.body)]
            };
            for (_, f) in &fns {
                require_rational(f, args.numeric.exact)?;
                GridSpec::uniform(f.arity(), step.clone(), count)?.check_size(&limits)?;
            }
            if args.numeric.exact {
                emit_theorem(
                    &lemma_suite::<Exact>(&fns, &step, count, tol)?,
                    args.summary.as_deref(),
                )
            } else {
                emit_theorem(
                    &lemma_suite::<f64>(&fns, &step, count, tol)?,
                    args.summary.as_deref(),
                )
            }
        }
        ScenarioArg::Screen => {
            if args.summary.is_some() {
                bail!("--summary is not available for the 'screen' scenario");
            }
            let side = |expr: &Option<String>,
                        catalog: &Option<String>,
                        label: &str|
             -> Result<Resolved> {
                let source = match (expr, catalog) {
                    (Some(e), None) => Source {
                        expr: Some(e.clone()),
                        ..Source::default()
                    },
                    (None, Some(c)) => Source {
                        catalog: Some(c.clone()),
                        params: args.source.params.clone(),
                        ..Source::default()
                    },
                    _ => bail!("'screen' needs exactly one of --{label} or --{label}-catalog"),
                };
                resolve(&source, args.grid.n)
            };
            let f = side(&args.f, &args.f_catalog, "f")?;
            let g = side(&args.g, &args.g_catalog, "g")?;
            if f.arity != g.arity {
                bail!("f has {} variables but g has {}", f.arity, g.arity);
            }
            require_rational(&f.body, args.numeric.exact)?;
            require_rational(&g.body, args.numeric.exact)?;
            let spec = grid_spec(&args.grid, f.arity, &limits)?;
            let json = if args.numeric.exact {
                to_json(&screen_pair::<Exact>(&f.body, &g.body, &spec, tol)?)?
            } else {
                to_json(&screen_pair::<f64>(&f.body, &g.body, &spec, tol)?)?
            };
            print(&json)?;
            Ok(0)
        }
    }
}

fn uniform_grid(grid: &GridArgs) -> Result<(BigRational, usize)> {
    let step = parse_rational(&grid.step).ok_or_else(|| anyhow!("invalid step '{}'", grid.step))?;
    let count = grid
        .count
        .trim()
        .parse()
        .map_err(|_| anyhow!("invalid count '{}'", grid.count))?;
    Ok((step, count))
}

fn emit_theorem<T: Scalar>(report: &TheoremReport<T>, summary: Option<&Path>) -> Result<u8> {
    print(&to_json(report)?)?;
    if let Some(path) = summary {
        let mut buf = Vec::new();
        write_summary(std::slice::from_ref(report), &mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(if report.verdict == TheoremVerdict::Inconsistent {
        EXIT_INCONSISTENT
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Transform(args) => transform(args),
        Command::Check(args) => check(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
