//! Command-line experiment runner.
//!
//! Result files are CSV (`n,mean,stderr,trials,rejected,functional,body,dim,seed`)
//! or JSON, and depend only on the flags and the seed. CSV files open with
//! `#` manifest lines; JSON files carry the same manifest as a field. Wall
//! time and thread count, which vary between runs, go to a sidecar
//! `<out>.manifest.json`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::asymptotics::{
    ball_max_test, compare_constant, exponent_fit, fit_log_law, predicted_constants,
    AsymptoticsError, LawShape, DEFAULT_CONSTANT_BAND,
};
use crate::bodies::{read_vertex_list, Body, BodyError};
use crate::estimators::{
    check_efron, check_eq14, check_t1_bound, check_simplex_extremality_bound, estimate_mq,
    estimate_mq_in, estimate_t_q, known_simplex_moment, primal_sweep, Estimate, EstimatorError,
    ExperimentConfig, Section, Selection,
};
use crate::models::{DEFAULT_COMPLEMENT_SAMPLES, DEFAULT_SIMPLEX_BUDGET};
use crate::sampling::{RngStream, GENERATOR_NAME};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 9] = [
    "n", "mean", "stderr", "trials", "rejected", "functional", "body", "dim", "seed",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "circumpoly", version, about = "Random circumscribed polytopes: simulation and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean-width or volume gap per n.
    Gap(GapArgs),
    /// Proper vertex and facet counts per n.
    Faces(SweepArgs),
    /// T_q^* of the dual model per n.
    Tq(TqArgs),
    /// Normalized simplex-volume moment M_q.
    Moments(MomentArgs),
    /// Identity and inequality checks with a pass/fail verdict.
    Check(CheckArgs),
    /// Fit a CSV of estimates against an asymptotic law.
    Fit(FitArgs),
    /// Compare E W(K^(n))/W(K) across bodies.
    Ballmax(BallmaxArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BodyArgs {
    /// ball, simplex, cube, polygon:k, file:PATH, or disk, triangle, square, tetrahedron.
    #[arg(long)]
    pub body: String,
    /// Ambient dimension; implied by the aliases and by vertex files.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapFunctional {
    Width,
    Volume,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, value_enum, default_value_t = GapFunctional::Width)]
    pub functional: GapFunctional,
}

#[derive(Debug, Clone, Args)]
pub struct TqArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    /// Uniform points per simplex S_F.
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectionArg {
    Simplex,
    Cube,
    Ball,
}

impl From<SectionArg> for Section {
    fn from(s: SectionArg) -> Self {
        match s {
            SectionArg::Simplex => Section::Simplex,
            SectionArg::Cube => Section::Cube,
            SectionArg::Ball => Section::Ball,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// The (d−1)-dimensional body the points are drawn from.
    #[arg(long, value_enum, default_value_t = SectionArg::Simplex)]
    pub section: SectionArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Eq14,
    Efron,
    T1Bound,
    Extremality,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Required except for `extremality`.
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Trials per n; for `t1-bound` the number of accepted trials.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_COMPLEMENT_SAMPLES)]
    pub complement_samples: usize,
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
    /// `extremality` only.
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    /// `extremality` only.
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Law {
    /// Width gap, `a·ln^{d-1}(n)/n`.
    Width,
    /// Volume gap; exponent fits only.
    Volume,
    /// Proper vertices, `a·ln^{d-1} n`.
    Vertices,
    /// Proper facets, `a·ln^{d-1} n`.
    Facets,
    /// `T_1^*`, `a·ln^{d-1}(n)/n`.
    T1,
}

impl Law {
    fn functional(self) -> &'static str {
        match self {
            Law::Width => "width",
            Law::Volume => "volume",
            Law::Vertices => "vertices",
            Law::Facets => "facets",
            Law::T1 => "t1",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV written by `gap`, `faces` or `tq`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub law: Law,
    /// Body whose predicted constant is compared; required unless `--exponent`.
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Report the slope of ln(mean) against ln(n) instead of a law constant.
    #[arg(long)]
    pub exponent: bool,
    /// Relative band for the fitted constant.
    #[arg(long, default_value_t = DEFAULT_CONSTANT_BAND)]
    pub band: f64,
    /// Estimate M_1 by simulation with this many samples instead of its closed form.
    #[arg(long)]
    pub m1_samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct BallmaxArgs {
    /// Comma-separated body specs; the first ball is the reference.
    #[arg(long, value_delimiter = ',', required = true)]
    pub bodies: Vec<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Keep each body at its native scale instead of rescaling to mean width 2.
    #[arg(long)]
    pub native_scale: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Parses a body spec. Aliases fix their dimension; `--dim` must agree.
pub fn parse_body_spec(spec: &str, dim: Option<usize>) -> Result<Body, CliError> {
    let fixed = |d: usize| match dim {
        Some(x) if x != d => Err(CliError::Usage(format!("body `{spec}` is {d}-dimensional, got --dim {x}"))),
        _ => Ok(()),
    };
    let need = || dim.ok_or_else(|| CliError::Usage(format!("body `{spec}` needs --dim")));
    let body = match spec {
        "ball" => Body::unit_ball(need()?),
        "simplex" => Body::regular_simplex(need()?)?,
        "cube" => Body::cube(need()?, 1.0)?,
        "disk" => {
            fixed(2)?;
            Body::unit_ball(2)
        }
        "triangle" => {
            fixed(2)?;
            Body::regular_polygon(3, 1.0)?
        }
        "square" => {
            fixed(2)?;
            Body::cube(2, 1.0)?
        }
        "tetrahedron" => {
            fixed(3)?;
            Body::regular_simplex(3)?
        }
        _ => {
            if let Some(k) = spec.strip_prefix("polygon:") {
                fixed(2)?;
                let k: usize = k
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad polygon side count in `{spec}`")))?;
                Body::regular_polygon(k, 1.0)?
            } else if let Some(path) = spec.strip_prefix("file:") {
                let pts = read_vertex_list(Path::new(path))?;
                let body = Body::from_vertices(&pts, true)?;
                fixed(body.dim())?;
                body
            } else {
                return Err(CliError::Usage(format!("unknown body `{spec}`")));
            }
        }
    };
    if body.dim() < 2 {
        return Err(CliError::Usage("dimension must be at least 2".into()));
    }
    Ok(body)
}

/// Deterministic run description, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub generator: String,
    pub seed: u64,
    pub config: serde_json::Value,
    /// `(n, rejected trials)` per row, where meaningful.
    pub rejected: Vec<(usize, u64)>,
}

impl RunManifest {
    fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            generator: GENERATOR_NAME.into(),
            seed,
            config,
            rejected: Vec::new(),
        }
    }

    fn comment_lines(&self) -> String {
        let rejected: Vec<String> = self.rejected.iter().map(|(n, r)| format!("{n}={r}")).collect();
        format!(
            "# tool: {} {}\n# command: {}\n# generator: {}\n# seed: {}\n# config: {}\n# rejected:{}\n",
            self.tool,
            self.version,
            self.command,
            self.generator,
            self.seed,
            self.config,
            if rejected.is_empty() { String::new() } else { format!(" {}", rejected.join(";")) }
        )
    }
}

/// One CSV data row.
#[derive(Debug, Clone)]
pub struct Row {
    pub n: usize,
    pub estimate: Estimate,
    pub functional: String,
}

fn render_csv(manifest: &RunManifest, rows: &[Row], body: &str, dim: usize, seed: u64) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            format!("{}", r.estimate.mean),
            format!("{}", r.estimate.stderr),
            r.estimate.trials().to_string(),
            r.estimate.rejected.to_string(),
            r.functional.clone(),
            body.to_string(),
            dim.to_string(),
            seed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let body = String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(manifest.comment_lines() + &body)
}

fn render_json<T: Serialize>(manifest: &RunManifest, payload: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(payload)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("manifest".into(), serde_json::to_value(manifest)?);
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Writes through a temporary file and a rename, then the sidecar.
fn emit(common: &Common, content: &str, manifest: &RunManifest, started: Instant) -> Result<(), CliError> {
    match &common.out {
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
        Some(path) => {
            write_atomically(path, content.as_bytes())?;
            let sidecar = json!({
                "manifest": manifest,
                "wall_time_seconds": started.elapsed().as_secs_f64(),
                "threads": common.threads.map(|t| t as usize).unwrap_or_else(rayon::current_num_threads),
            });
            let mut side = path.as_os_str().to_owned();
            side.push(".manifest.json");
            write_atomically(Path::new(&side), (serde_json::to_string_pretty(&sidecar)? + "\n").as_bytes())?;
        }
    }
    Ok(())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn threads(common: &Common) -> Option<usize> {
    common.threads.map(|t| t as usize)
}

fn sweep_config(args: &SweepArgs, selection: Selection) -> Result<(ExperimentConfig, Body), CliError> {
    let body = parse_body_spec(&args.body.body, args.body.dim)?;
    let mut cfg = ExperimentConfig::new(body.clone(), args.n.clone(), args.trials, args.common.seed)
        .with_selection(selection);
    cfg.threads = threads(&args.common);
    cfg.validate()?;
    Ok((cfg, body))
}

fn sweep_echo(args: &SweepArgs) -> serde_json::Value {
    json!({
        "body": args.body.body,
        "dim": args.body.dim,
        "n": args.n,
        "trials": args.trials,
    })
}

fn with_rejections(mut manifest: RunManifest, rows: &[Row]) -> RunManifest {
    for r in rows {
        if !manifest.rejected.iter().any(|x| x.0 == r.n) {
            manifest.rejected.push((r.n, r.estimate.rejected));
        }
    }
    manifest
}

fn cmd_gap(args: &GapArgs, started: Instant) -> Result<i32, CliError> {
    let sel = match args.functional {
        GapFunctional::Width => Selection::WIDTH,
        GapFunctional::Volume => Selection::VOLUME,
    };
    let (cfg, body) = sweep_config(&args.sweep, sel)?;
    let name = match args.functional {
        GapFunctional::Width => "width",
        GapFunctional::Volume => "volume",
    };
    let rows: Vec<Row> = primal_sweep(&cfg)?
        .into_iter()
        .map(|r| Row {
            n: r.n,
            estimate: if sel.width { r.width_gap } else { r.volume_gap },
            functional: name.into(),
        })
        .collect();
    let mut echo = sweep_echo(&args.sweep);
    echo["functional"] = json!(name);
    let manifest = with_rejections(RunManifest::new("gap", cfg.seed, echo), &rows);
    let csv = render_csv(&manifest, &rows, &args.sweep.body.body, body.dim(), cfg.seed)?;
    emit(&args.sweep.common, &csv, &manifest, started)?;
    Ok(EXIT_OK)
}

fn cmd_faces(args: &SweepArgs, started: Instant) -> Result<i32, CliError> {
    let (cfg, body) = sweep_config(args, Selection::FACES)?;
    let mut rows = Vec::new();
    for r in primal_sweep(&cfg)? {
        rows.push(Row {
            n: r.n,
            estimate: r.vertices,
            functional: "vertices".into(),
        });
        rows.push(Row {
            n: r.n,
            estimate: r.facets,
            functional: "facets".into(),
        });
    }
    let manifest = with_rejections(RunManifest::new("faces", cfg.seed, sweep_echo(args)), &rows);
    let csv = render_csv(&manifest, &rows, &args.body.body, body.dim(), cfg.seed)?;
    emit(&args.common, &csv, &manifest, started)?;
    Ok(EXIT_OK)
}

fn cmd_tq(args: &TqArgs, started: Instant) -> Result<i32, CliError> {
    let (mut cfg, body) = sweep_config(&args.sweep, Selection::default())?;
    cfg.simplex_budget = args.budget;
    cfg.validate()?;
    let rows: Vec<Row> = estimate_t_q(&cfg, args.q)?
        .into_iter()
        .map(|r| Row {
            n: r.n,
            estimate: r.t_q,
            functional: format!("t{}", args.q),
        })
        .collect();
    let mut echo = sweep_echo(&args.sweep);
    echo["q"] = json!(args.q);
    echo["budget"] = json!(args.budget);
    let manifest = with_rejections(RunManifest::new("tq", cfg.seed, echo), &rows);
    let csv = render_csv(&manifest, &rows, &args.sweep.body.body, body.dim(), cfg.seed)?;
    emit(&args.sweep.common, &csv, &manifest, started)?;
    Ok(EXIT_OK)
}

fn cmd_moments(args: &MomentArgs, started: Instant) -> Result<i32, CliError> {
    if args.dim < 2 {
        return Err(CliError::Usage("moments need --dim ≥ 2".into()));
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let section: Section = args.section.into();
    let mut rng = RngStream::new(args.common.seed, 0);
    let estimate = estimate_mq_in(section, args.dim, args.q, args.samples, &mut rng);
    let section_name = serde_json::to_value(section)?
        .as_str()
        .unwrap_or("section")
        .to_string();
    let rows = [Row {
        n: args.samples,
        estimate,
        functional: format!("m{}", args.q),
    }];
    let echo = json!({"dim": args.dim, "q": args.q, "samples": args.samples, "section": section_name});
    let manifest = RunManifest::new("moments", args.common.seed, echo);
    let csv = render_csv(&manifest, &rows, &section_name, args.dim, args.common.seed)?;
    emit(&args.common, &csv, &manifest, started)?;
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs, started: Instant) -> Result<i32, CliError> {
    let echo = json!({
        "which": format!("{:?}", args.which).to_lowercase(),
        "body": args.body,
        "dim": args.dim,
        "n": args.n,
        "trials": args.trials,
        "complement_samples": args.complement_samples,
        "budget": args.budget,
        "q": args.q,
        "samples": args.samples,
    });
    let manifest = RunManifest::new("check", args.common.seed, echo);
    let config = || -> Result<ExperimentConfig, CliError> {
        let spec = args
            .body
            .as_deref()
            .ok_or_else(|| CliError::Usage("this check needs --body".into()))?;
        if args.n.is_empty() {
            return Err(CliError::Usage("this check needs --n".into()));
        }
        let body = parse_body_spec(spec, args.dim)?;
        let mut cfg = ExperimentConfig::new(body, args.n.clone(), args.trials, args.common.seed);
        cfg.threads = threads(&args.common);
        cfg.complement_samples = args.complement_samples;
        cfg.simplex_budget = args.budget;
        cfg.validate()?;
        Ok(cfg)
    };
    let (text, pass) = match args.which {
        Which::Eq14 => {
            let rows = check_eq14(&config()?)?;
            let pass = rows.iter().all(|r| r.pass);
            (render_json(&manifest, &json!({"which": "eq14", "pass": pass, "rows": rows}))?, pass)
        }
        Which::Efron => {
            let rows = check_efron(&config()?)?;
            let pass = rows.iter().all(|r| r.pass);
            (render_json(&manifest, &json!({"which": "efron", "pass": pass, "rows": rows}))?, pass)
        }
        Which::T1Bound => {
            let report = check_t1_bound(&config()?)?;
            let pass = report.pass;
            (render_json(&manifest, &json!({"which": "t1-bound", "pass": pass, "report": report}))?, pass)
        }
        Which::Extremality => {
            let d = args
                .dim
                .ok_or_else(|| CliError::Usage("extremality needs --dim".into()))?;
            let report = check_simplex_extremality_bound(d, args.q, args.samples, args.common.seed)?;
            let pass = report.pass;
            (render_json(&manifest, &json!({"which": "extremality", "pass": pass, "report": report}))?, pass)
        }
    };
    emit(&args.common, &text, &manifest, started)?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Reads `(n, Estimate)` rows of one functional from a result CSV, together
/// with the dimension recorded in it.
pub fn read_rows(path: &Path, functional: &str) -> Result<(Vec<(usize, Estimate)>, Option<usize>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut out = Vec::new();
    let mut dim = None;
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        if field(5) != functional {
            continue;
        }
        let bad = |what: &str| CliError::Usage(format!("{}: bad {what} in `{}`", path.display(), rec.as_slice()));
        let n: usize = field(0).parse().map_err(|_| bad("n"))?;
        let mean: f64 = field(1).parse().map_err(|_| bad("mean"))?;
        let stderr: f64 = field(2).parse().map_err(|_| bad("stderr"))?;
        let trials: u64 = field(3).parse().map_err(|_| bad("trials"))?;
        let rejected: u64 = field(4).parse().map_err(|_| bad("rejected"))?;
        dim = field(7).parse().ok().or(dim);
        out.push((
            n,
            Estimate {
                mean,
                stderr,
                count: trials.saturating_sub(rejected),
                rejected,
            },
        ));
    }
    Ok((out, dim))
}

fn cmd_fit(args: &FitArgs, started: Instant) -> Result<i32, CliError> {
    let functional = args.law.functional();
    let (points, csv_dim) = read_rows(&args.input, functional)?;
    let echo = json!({
        "input": args.input.file_name().map(|f| f.to_string_lossy().into_owned()),
        "law": functional,
        "body": args.body,
        "dim": args.dim,
        "exponent": args.exponent,
        "band": args.band,
        "m1_samples": args.m1_samples,
    });
    let manifest = RunManifest::new("fit", args.common.seed, echo);
    if args.exponent {
        let slope = exponent_fit(&points)?;
        let text = render_json(&manifest, &json!({"law": functional, "exponent": slope, "points": points.len()}))?;
        emit(&args.common, &text, &manifest, started)?;
        return Ok(EXIT_OK);
    }
    let shape = match args.law {
        Law::Width | Law::T1 => LawShape::Gap,
        Law::Vertices | Law::Facets => LawShape::Count,
        Law::Volume => return Err(CliError::Usage("the volume law has no constant; use --exponent".into())),
    };
    let spec = args
        .body
        .as_deref()
        .ok_or_else(|| CliError::Usage("fit needs --body to predict the constant".into()))?;
    let body = parse_body_spec(spec, args.dim.or(csv_dim))?;
    let d = body.dim();
    let poly = body
        .polytope_ref()
        .ok_or_else(|| CliError::Usage(format!("body `{spec}` is not a polytope")))?;
    let m1 = match args.m1_samples {
        Some(samples) => estimate_mq(d, 1, samples, &mut RngStream::new(args.common.seed, 0)),
        None => Estimate::exact(
            known_simplex_moment(d, 1)
                .ok_or_else(|| CliError::Usage(format!("no closed form for M_1 in d = {d}; pass --m1-samples")))?,
        ),
    };
    let constants = predicted_constants(poly, m1.mean)?;
    let predicted = match args.law {
        Law::Width => constants.width,
        Law::Vertices => constants.vertices,
        Law::Facets | Law::T1 => constants.facets,
        Law::Volume => unreachable!("handled above"),
    };
    let fit = fit_log_law(&points, d, shape)?;
    let check = compare_constant(fit.coefficient, predicted, args.band);
    let text = render_json(
        &manifest,
        &json!({"law": functional, "d": d, "m1": m1, "fit": fit, "predicted": constants, "check": check, "pass": check.pass}),
    )?;
    emit(&args.common, &text, &manifest, started)?;
    Ok(if check.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Rescales to mean width 2, the mean width of the unit ball.
pub fn normalize_width(body: &Body) -> Result<Body, CliError> {
    let w = body.mean_width().0;
    Ok(body.scaled(2.0 / w)?)
}

fn cmd_ballmax(args: &BallmaxArgs, started: Instant) -> Result<i32, CliError> {
    let mut bodies = Vec::new();
    for spec in &args.bodies {
        let b = parse_body_spec(spec, args.dim)?;
        let b = if args.native_scale { b } else { normalize_width(&b)? };
        bodies.push((spec.clone(), b));
    }
    let report = ball_max_test(&bodies, args.n, args.trials, args.common.seed, threads(&args.common))?;
    let echo = json!({
        "bodies": args.bodies,
        "dim": args.dim,
        "n": args.n,
        "trials": args.trials,
        "native_scale": args.native_scale,
    });
    let mut manifest = RunManifest::new("ballmax", args.common.seed, echo);
    manifest.rejected = vec![(args.n, report.entries.iter().map(|e| e.ratio.rejected).sum())];
    let text = render_json(&manifest, &report)?;
    emit(&args.common, &text, &manifest, started)?;
    Ok(if report.pass == Some(false) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    })
}

/// Runs a parsed command and returns its exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let started = Instant::now();
    match &cli.command {
        Command::Gap(a) => cmd_gap(a, started),
        Command::Faces(a) => cmd_faces(a, started),
        Command::Tq(a) => cmd_tq(a, started),
        Command::Moments(a) => cmd_moments(a, started),
        Command::Check(a) => cmd_check(a, started),
        Command::Fit(a) => cmd_fit(a, started),
        Command::Ballmax(a) => cmd_ballmax(a, started),
    }
}

/// Parses `args` (program name first), runs the command, and reports errors
/// on stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
