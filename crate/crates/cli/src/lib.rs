//! Command-line front end for `horopack`.
//!
//! Stages talk through surface files (JSON), read from `--input` or stdin
//! and written to `--output` or stdout. Exit codes: 0 success, 1 a check
//! failed, 2 bad arguments, 3 a file could not be read, parsed or written.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use horopack::analysis::{
    six_theorem_gate, slope_length, transverse_disk_obstruction, CuspBasis, GateReport, Slope,
    OBSTRUCTION_REFERENCE,
};
use horopack::decor::{
    analyze_recursion, check_geometric, choose_m_for_epsilon, cusp_areas, paper_decoration,
    saturating_c1, target_length, CornerDecoration, CuspAreaReport, DecorationParams,
    GeometricityReport, DEFAULT_RELATIVE_TOL,
};
use horopack::develop::{
    develop, embedded_cusp_check, render_svg_string, CuspHolonomy, DevelopOptions,
    DevelopedSurface, EmbeddingReport, RenderOptions, TreeLink, TreeOrder, Window,
};
use horopack::hyp2::{Horoball, IdealPoint};
use horopack::optimize::{
    density, maximize_min_cusp_area, ConjectureProbe, OptimizeConfig, RestartSummary,
};
use horopack::persist::{self, LoadedSurface, PersistError};
use horopack::{color_faces, family_member, Triangulation};
use num_complex::Complex64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Tolerance for numbers that are only reported, such as holonomy
/// scalings.
pub const REPORT_TOL: f64 = 1e-6;

/// Arrays of objects longer than this are elided from human output.
const HUMAN_LIST_LIMIT: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "horopack",
    version,
    about = "Horoball packings on ideally triangulated punctured spheres"
)]
pub struct Cli {
    /// Print a versioned JSON report instead of `key: value` lines.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the colored subdivision T_m of the icosahedron.
    Construct(ConstructArgs),
    /// Attach the white/gray labeling decoration.
    Decorate(DecorateArgs),
    /// Check the decoration: (A), (B), (C), completeness, embedded cusps.
    Verify(VerifyArgs),
    /// Report cusp areas, their minimum and the margin to 10/√3.
    Areas(AreasArgs),
    /// Develop into the upper half-plane and report placements.
    Develop(DevelopArgs),
    /// Draw the developed fundamental region as SVG.
    Render(RenderArgs),
    /// Iterate c ↦ 4/(L − 2c) and classify its fixed points.
    Recursion(RecursionArgs),
    /// Maximize the smallest cusp area.
    Optimize(OptimizeArgs),
    /// Length of a slope in a cusp lattice.
    Slope(SlopeArgs),
    /// Search for a transverse horoball missing the Farey packing.
    Obstruct(ObstructArgs),
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// Surface file; stdin when absent or `-`.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArg {
    /// Destination; stdout when absent or `-`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub m: u32,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ParamChoice {
    /// Pick the smallest m whose cusps all exceed 10/√3 − epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Explicit c₁,…,c_m.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct DecorateArgs {
    #[command(flatten)]
    pub params: ParamChoice,
    /// Surface to decorate; built from the chosen m when absent.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArg,
    /// Relative tolerance of the geometric checks.
    #[arg(long, default_value_t = DEFAULT_RELATIVE_TOL)]
    pub tol: f64,
    /// Tolerance on holonomy scaling factors.
    #[arg(long, default_value_t = DEFAULT_RELATIVE_TOL)]
    pub holonomy_tol: f64,
    /// Extra dual steps beyond each vertex star in the embedding check.
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long)]
    pub skip_embedding: bool,
}

#[derive(Debug, Args)]
pub struct AreasArgs {
    #[command(flatten)]
    pub input: InputArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TreeArg {
    Bfs,
    Dfs,
}

#[derive(Debug, Args)]
pub struct DevelopFlags {
    /// Triangle placed on (0, α, ∞).
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    #[arg(long, value_enum, default_value_t = TreeArg::Bfs)]
    pub tree: TreeArg,
    /// Develop even if (A), (B) or (C) fails.
    #[arg(long)]
    pub allow_nongeometric: bool,
    #[arg(long, default_value_t = DEFAULT_RELATIVE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DevelopArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[command(flatten)]
    pub flags: DevelopFlags,
    /// Also write the SVG picture here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[command(flatten)]
    pub flags: DevelopFlags,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub y_max: Option<f64>,
    /// Pixels per unit.
    #[arg(long, default_value_t = 400.0)]
    pub scale: f64,
    #[arg(long)]
    pub labels: bool,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct RecursionArgs {
    /// Target length L (default 10/√3).
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Starting value (default the saturating c₁).
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub input: InputArg,
    /// JSON optimizer configuration; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Start from the decoration stored in the input file.
    #[arg(long)]
    pub warm_start: bool,
    /// Write the objective trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the optimized surface here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    /// First lattice generator as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<f64>)]
    pub tau1: (f64, f64),
    /// Second lattice generator as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<f64>)]
    pub tau2: (f64, f64),
    /// Slope as `p,q`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair::<i64>)]
    pub pq: (i64, i64),
}

#[derive(Debug, Args)]
pub struct ObstructArgs {
    #[arg(long, default_value_t = OBSTRUCTION_REFERENCE.0)]
    pub depth: u32,
    #[arg(long, default_value_t = OBSTRUCTION_REFERENCE.1)]
    pub resolution: usize,
    /// Include wall-clock time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String>
where
    T::Err: std::fmt::Display,
{
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// A check failed; the report has already been printed.
    Failed,
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Failed => EXIT_CHECK_FAILED,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<PersistError> for CliError {
    fn from(e: PersistError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Standard streams, swappable for tests.
pub struct Streams<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs with the process streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut i, mut o, mut e) = (std::io::stdin(), std::io::stdout(), std::io::stderr());
    let code = run_with(
        argv,
        &mut Streams {
            stdin: &mut i,
            stdout: &mut o,
            stderr: &mut e,
        },
    );
    let _ = o.flush();
    code
}

pub fn run_with<I, T>(argv: I, io: &mut Streams) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = io.stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = io.stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, io) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Usage(m) => {
                    let _ = writeln!(io.stderr, "error: {m}");
                }
                CliError::Io(m) => {
                    let _ = writeln!(io.stderr, "error: {m}");
                }
                CliError::Failed => {}
            }
            e.code()
        }
    }
}

fn execute(cli: &Cli, io: &mut Streams) -> Result<(), CliError> {
    match &cli.command {
        Command::Construct(a) => construct(a, cli.json, io),
        Command::Decorate(a) => decorate(a, cli.json, io),
        Command::Verify(a) => verify(a, cli.json, io),
        Command::Areas(a) => areas(a, cli.json, io),
        Command::Develop(a) => develop_cmd(a, cli.json, io),
        Command::Render(a) => render(a, io),
        Command::Recursion(a) => recursion(a, cli.json, io),
        Command::Optimize(a) => optimize(a, cli.json, io),
        Command::Slope(a) => slope(a, cli.json, io),
        Command::Obstruct(a) => obstruct(a, cli.json, io),
    }
}

// ---- plumbing

fn is_stdio(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref().filter(|p| p.as_os_str() != "-")
}

fn read_input(input: &Option<PathBuf>, io: &mut Streams) -> Result<LoadedSurface, CliError> {
    match is_stdio(input) {
        Some(path) => Ok(persist::load_surface(path)?),
        None => {
            let mut text = String::new();
            io.stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::Io(format!("cannot read stdin: {e}")))?;
            Ok(persist::surface_from_str(&text)?)
        }
    }
}

fn write_text(dest: Option<&Path>, text: &str, io: &mut Streams) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io
            .stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
    }
}

fn emit<T: Serialize>(kind: &str, body: &T, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let text = if json {
        persist::report_to_string(kind, body)?
    } else {
        let v = serde_json::to_value(body).map_err(|e| CliError::Io(e.to_string()))?;
        human(&v)
    };
    write_text(None, &text, io)
}

/// `key: value` lines with the same number formatting as the JSON output.
pub fn human(v: &Value) -> String {
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) => {
            if xs.is_empty() {
                out.push_str(&format!("{prefix}: []\n"));
            } else if let Some(parts) = xs.iter().map(scalar).collect::<Option<Vec<_>>>() {
                out.push_str(&format!("{prefix}: {}\n", parts.join(" ")));
            } else if xs.len() > HUMAN_LIST_LIMIT {
                out.push_str(&format!("{prefix}: {} entries (see --json)\n", xs.len()));
            } else {
                for (i, x) in xs.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), x, out);
                }
            }
        }
        _ => {
            let s = scalar(v).expect("scalar");
            out.push_str(&format!("{prefix}: {s}\n"));
        }
    }
}

#[derive(Serialize)]
struct Counts {
    triangles: usize,
    vertices: usize,
    edges: usize,
    euler_characteristic: i64,
    degree_histogram: BTreeMap<usize, usize>,
}

fn counts(t: &Triangulation) -> Counts {
    Counts {
        triangles: t.triangle_count(),
        vertices: t.vertex_count(),
        edges: t.edge_count(),
        euler_characteristic: t.euler_characteristic(),
        degree_histogram: t.degree_histogram(),
    }
}

fn require_decoration(s: &LoadedSurface) -> Result<&CornerDecoration, CliError> {
    s.decoration
        .as_ref()
        .ok_or_else(|| usage("input surface has no corner areas; run `decorate` first"))
}

// ---- subcommands

#[derive(Serialize)]
struct Written {
    path: String,
    m: Option<u32>,
    counts: Counts,
}

fn save_surface_to(
    t: &Triangulation,
    dec: Option<&CornerDecoration>,
    params: Option<&DecorationParams>,
    out: &Option<PathBuf>,
    json: bool,
    io: &mut Streams,
) -> Result<(), CliError> {
    let text = persist::surface_to_string(t, dec, params)?;
    match is_stdio(out) {
        None => write_text(None, &text, io),
        Some(path) => {
            write_text(Some(path), &text, io)?;
            let w = Written {
                path: path.display().to_string(),
                m: t.family().map(|f| f.m),
                counts: counts(t),
            };
            emit("written", &w, json, io)
        }
    }
}

fn construct(a: &ConstructArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let base = family_member(a.m);
    // m = 0 is the bare icosahedron, which has no coloring
    let t = if base.family().is_some() {
        color_faces(&base).map_err(usage)?
    } else {
        base
    };
    save_surface_to(&t, None, None, &a.out.output, json, io)
}

fn decorate(a: &DecorateArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let params = match (&a.params.epsilon, &a.params.c) {
        (Some(eps), _) => choose_m_for_epsilon(*eps).map_err(usage)?,
        (None, Some(c)) => DecorationParams::new(c.clone()).map_err(usage)?,
        (None, None) => unreachable!("clap requires one of the group"),
    };
    let t = match &a.input {
        Some(_) => {
            let s = read_input(&a.input, io)?;
            let m = s.triangulation.family().map(|f| f.m);
            if m != Some(params.m) {
                return Err(usage(format!(
                    "input surface has m = {m:?} but the parameters need m = {}",
                    params.m
                )));
            }
            if s.triangulation.is_colored() {
                s.triangulation
            } else {
                color_faces(&s.triangulation).map_err(usage)?
            }
        }
        None => color_faces(&family_member(params.m)).map_err(usage)?,
    };
    let dec = paper_decoration(&t, &params).map_err(usage)?;
    save_surface_to(&t, Some(&dec), Some(&params), &a.out.output, json, io)
}

#[derive(Serialize)]
struct Completeness {
    max_scaling_error: f64,
    worst_cusp: usize,
    tolerance: f64,
    complete: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    counts: Counts,
    decorated: bool,
    geometric: Option<bool>,
    geometricity: Option<GeometricityReport>,
    completeness: Option<Completeness>,
    embedding: Option<EmbeddingReport>,
    passed: bool,
}

fn verify(a: &VerifyArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let s = read_input(&a.input.input, io)?;
    let t = &s.triangulation;
    let mut rep = VerifyReport {
        counts: counts(t),
        decorated: s.decoration.is_some(),
        geometric: None,
        geometricity: None,
        completeness: None,
        embedding: None,
        passed: t.euler_characteristic() == 2,
    };
    if let Some(dec) = &s.decoration {
        let geo = check_geometric(t, dec, a.tol).map_err(usage)?;
        let ok = geo.is_geometric();
        rep.geometric = Some(ok);
        rep.geometricity = Some(geo);
        rep.passed &= ok;
        if ok {
            let opts = DevelopOptions {
                rel_tol: a.tol,
                ..DevelopOptions::default()
            };
            let dev = develop(t, dec, &opts).map_err(usage)?;
            let (worst, err) = dev
                .holonomies()
                .iter()
                .map(|h| (h.vertex, (h.scaling - 1.0).abs()))
                .fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
            let complete = err <= a.holonomy_tol;
            rep.completeness = Some(Completeness {
                max_scaling_error: err,
                worst_cusp: worst,
                tolerance: a.holonomy_tol,
                complete,
            });
            rep.passed &= complete;
            if !a.skip_embedding {
                let emb = embedded_cusp_check(&dev, a.radius);
                rep.passed &= emb.embedded();
                rep.embedding = Some(emb);
            }
        }
    }
    emit("verify", &rep, json, io)?;
    if rep.passed {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

#[derive(Serialize)]
struct AreasReport {
    #[serde(flatten)]
    report: CuspAreaReport,
    total_area: f64,
    max_closed_form_error: Option<f64>,
    density: f64,
}

fn areas(a: &AreasArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let s = read_input(&a.input.input, io)?;
    let dec = require_decoration(&s)?;
    let t = &s.triangulation;
    let report = cusp_areas(t, dec, s.params.as_ref()).map_err(usage)?;
    let body = AreasReport {
        total_area: report.total_area(),
        max_closed_form_error: report.max_closed_form_error(),
        density: density(t, dec).map_err(usage)?,
        report,
    };
    emit("cusp_areas", &body, json, io)
}

fn develop_surface(s: &LoadedSurface, f: &DevelopFlags) -> Result<DevelopedSurface, CliError> {
    let dec = require_decoration(s)?;
    let opts = DevelopOptions {
        base: f.base,
        tree: match f.tree {
            TreeArg::Bfs => TreeOrder::BreadthFirst,
            TreeArg::Dfs => TreeOrder::DepthFirst,
        },
        require_geometric: !f.allow_nongeometric,
        rel_tol: f.tol,
    };
    develop(&s.triangulation, dec, &opts).map_err(usage)
}

#[derive(Serialize)]
struct Placement {
    triangle: usize,
    points: [IdealPoint; 3],
    horoballs: [Horoball; 3],
    parent: Option<TreeLink>,
}

#[derive(Serialize)]
struct DevelopReport {
    base: usize,
    order: Vec<usize>,
    edge_consistency: f64,
    placements: Vec<Placement>,
    holonomies: Vec<CuspHolonomy>,
    complete: bool,
}

fn develop_cmd(a: &DevelopArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let s = read_input(&a.input.input, io)?;
    let dev = develop_surface(&s, &a.flags)?;
    if let Some(path) = &a.svg {
        let svg = render_svg_string(&dev, &RenderOptions::new(Window::fit(&dev))).map_err(usage)?;
        write_text(Some(path), &svg, io)?;
    }
    let holonomies = dev.holonomies();
    let body = DevelopReport {
        base: dev.base,
        order: dev.order.clone(),
        edge_consistency: dev.edge_consistency(),
        placements: (0..dev.placements.len())
            .map(|i| Placement {
                triangle: i,
                points: dev.placements[i].points,
                horoballs: dev.horoballs[i],
                parent: dev.tree[i],
            })
            .collect(),
        complete: holonomies.iter().all(|h| h.is_parabolic(REPORT_TOL)),
        holonomies,
    };
    match is_stdio(&a.out.output) {
        Some(path) => {
            let text = persist::report_to_string("develop", &body)?;
            write_text(Some(path), &text, io)
        }
        None => emit("develop", &body, json, io),
    }
}

fn render(a: &RenderArgs, io: &mut Streams) -> Result<(), CliError> {
    let s = read_input(&a.input.input, io)?;
    let dev = develop_surface(&s, &a.flags)?;
    let fit = Window::fit(&dev);
    let window = Window {
        x_min: a.x_min.unwrap_or(fit.x_min),
        x_max: a.x_max.unwrap_or(fit.x_max),
        y_max: a.y_max.unwrap_or(fit.y_max),
    };
    let opts = RenderOptions {
        window,
        scale: a.scale,
        labels: a.labels,
    };
    let svg = render_svg_string(&dev, &opts).map_err(usage)?;
    write_text(is_stdio(&a.out.output), &svg, io)
}

fn recursion(a: &RecursionArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let l = a.l.unwrap_or_else(target_length);
    let c1 = a.c1.unwrap_or_else(saturating_c1);
    let r = analyze_recursion(l, c1, a.steps).map_err(usage)?;
    emit("recursion", &r, json, io)
}

#[derive(Serialize)]
struct OptimizeReport {
    min_area: f64,
    min_vertex: usize,
    density: f64,
    best_restart: usize,
    restarts: Vec<RestartSummary>,
    conjecture: ConjectureProbe,
    certificate: GeometricityReport,
    iterations: usize,
}

fn optimize(a: &OptimizeArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let s = read_input(&a.input.input, io)?;
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<OptimizeConfig>(&text).map_err(|e| {
                CliError::Io(format!(
                    "{}: line {}, column {}: {e}",
                    path.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => OptimizeConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(r) = a.restarts {
        cfg.restarts = r;
    }
    if a.warm_start {
        cfg.initial = Some(require_decoration(&s)?.clone());
    }
    let t = &s.triangulation;
    let r = maximize_min_cusp_area(t, &cfg).map_err(usage)?;
    if let Some(path) = &a.trace {
        write_text(Some(path), &r.trace_csv(), io)?;
    }
    if let Some(path) = is_stdio(&a.output) {
        let text = persist::surface_to_string(t, Some(&r.decoration), None)?;
        write_text(Some(path), &text, io)?;
    }
    let body = OptimizeReport {
        min_area: r.min_area,
        min_vertex: r.min_vertex,
        density: density(t, &r.decoration).map_err(usage)?,
        best_restart: r.best_restart,
        restarts: r.restarts,
        conjecture: r.conjecture,
        certificate: r.certificate,
        iterations: r.trace.len(),
    };
    emit("optimize", &body, json, io)
}

#[derive(Serialize)]
struct SlopeReport {
    tau1: [f64; 2],
    tau2: [f64; 2],
    p: i64,
    q: i64,
    length: f64,
    gate: GateReport,
}

fn slope(a: &SlopeArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let basis = CuspBasis::new(
        Complex64::new(a.tau1.0, a.tau1.1),
        Complex64::new(a.tau2.0, a.tau2.1),
    )
    .map_err(usage)?;
    let s = Slope::new(a.pq.0, a.pq.1).map_err(usage)?;
    let length = slope_length(&basis, s);
    let body = SlopeReport {
        tau1: [a.tau1.0, a.tau1.1],
        tau2: [a.tau2.0, a.tau2.1],
        p: s.p(),
        q: s.q(),
        length,
        gate: six_theorem_gate(&[length]).map_err(usage)?,
    };
    emit("slope", &body, json, io)
}

fn obstruct(a: &ObstructArgs, json: bool, io: &mut Streams) -> Result<(), CliError> {
    let r = transverse_disk_obstruction(a.depth, a.resolution, a.timing).map_err(usage)?;
    emit("obstruction", &r, json, io)
}
