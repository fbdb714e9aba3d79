//! The `racgdiv` command line: argument parsing, output files and exit codes.
//!
//! Exit codes: 0 on success, 1 when a budget cap stopped the computation
//! early (whatever was completed is still written), 2 on invalid input.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use racgdiv_core::cayley::{build_ball_partial, Budget, CayleyBall, GeodesicSpec};
use racgdiv_core::coxeter::{GroupFamily, NormalForm, PresentationGraph};
use racgdiv_core::divergence::{
    fit_growth, gersten_delta, ldiv_in, DivergenceSample, Fraction, PairSampling, SampleStatus,
};
use racgdiv_core::error::PartialStats;
use racgdiv_core::experiments::{
    default_r_max, morse_heuristic, run_gamma_spectrum, run_omega_gap, GapOptions,
};
use racgdiv_core::relhyp::{build_coned_off, classify_transitions, PeripheralStructure};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "racgdiv",
    version,
    about = "Divergence estimates for right-angled Coxeter groups",
    after_help = "Exit codes: 0 success, 1 budget exceeded (partial output kept), 2 invalid input."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate a Cayley ball and write sphere sizes as CSV.
    Ball(BallArgs),
    /// Lower divergence of a periodic geodesic; samples CSV and fit JSON.
    Ldiv(LdivArgs),
    /// Gersten divergence δ_ρ(r) of the Cayley graph; samples CSV and fit JSON.
    Gersten(GerstenArgs),
    /// Coned-off Cayley ball as JSON, with optional coned distances.
    Cone(ConeArgs),
    /// Deep/transition classification of a geodesic segment as CSV.
    Transitions(TransitionArgs),
    /// Packaged experiments with JSON and Markdown reports.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GroupArgs {
    /// Built-in family.
    #[arg(long, value_name = "gamma:<d>|omega:<d>", required_unless_present = "graph", conflicts_with = "graph")]
    pub family: Option<GroupFamily>,
    /// Presentation graph as JSON: {"generators": [...], "edges": [[u, v], ...]}.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for sampled computations; recorded even when unused.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: one per core).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Stop ball enumeration beyond this many vertices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_vertices: Option<u64>,
    /// Stop ball enumeration after this many seconds.
    #[arg(long, value_parser = positive_f64)]
    pub max_seconds: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BallArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 3)]
    pub radius: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LdivArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Period of the geodesic, e.g. "a0 b0".
    #[arg(long)]
    pub word: String,
    /// Position of α(0); default the identity.
    #[arg(long, default_value = "ε")]
    pub anchor: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_min: u32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_max: u32,
    /// Truncation radius is trunc-factor · r.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..))]
    pub trunc_factor: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Exhaustive up to 512 sphere points, sampled beyond.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GerstenArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_min: u32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_max: u32,
    /// Ball radius is trunc-factor · r-max.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub trunc_factor: u32,
    /// Avoided ball has radius ⌈ρ·r⌉; a fraction in (0, 1].
    #[arg(long, default_value = "1", value_parser = parse_fraction)]
    #[serde(serialize_with = "fraction_str")]
    pub rho: Fraction,
    #[arg(long, value_enum, default_value_t = SamplingMode::Auto)]
    pub sampling: SamplingMode,
    /// Pairs drawn in sampled mode.
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(1..))]
    pub pairs: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PeripheralArgs {
    /// Generators of one peripheral subgroup, e.g. "a0,a1,b0,b1"; repeat for
    /// several. Default for omega:<d> is the vertex set of Γ_d.
    #[arg(long = "peripheral", value_name = "GENERATORS")]
    pub peripheral: Vec<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConeArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub peripheral: PeripheralArgs,
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Coned distance between two elements, "u:v" (e.g. "ε:c1"); repeatable.
    #[arg(long = "distance", value_name = "U:V")]
    pub distance: Vec<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub peripheral: PeripheralArgs,
    /// Period of the geodesic.
    #[arg(long)]
    pub word: String,
    #[arg(long, default_value = "ε")]
    pub anchor: String,
    /// Segment runs from α(from) to α(from + length).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub from: i64,
    /// Number of edges in the segment.
    #[arg(long, default_value_t = 11)]
    pub length: u32,
    #[arg(long, default_value_t = 1)]
    pub epsilon: u32,
    #[arg(long = "R", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    #[serde(rename = "R")]
    pub big_r: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// ldiv of (a_d b_d)^∞ across Γ_d.
    Spectrum,
    /// (a_d b_d)^∞ against (c1 b0)^∞ in Ω_d.
    Gap,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    /// Comma-separated d values (default 1,2 for spectrum, 1 for gap).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    pub d: Vec<u32>,
    /// Default 4 for d ≤ 2, 3 otherwise.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_max: Option<u32>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..))]
    pub trunc_factor: u32,
    #[arg(long, default_value_t = 1)]
    pub epsilon: u32,
    #[arg(long = "R", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    #[serde(rename = "R")]
    pub big_r: u32,
    /// Edges in each classified segment.
    #[arg(long, default_value_t = 11)]
    pub length: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub run: RunArgs,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn parse_fraction(s: &str) -> Result<Fraction, String> {
    s.parse::<Fraction>().map_err(|e| e.to_string())
}

fn fraction_str<S: serde::Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", f.num, f.den))
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub family: Option<String>,
    pub params: serde_json::Value,
    pub seed: u64,
    pub out: String,
    pub threads: Option<u32>,
    pub max_vertices: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl RunConfig {
    fn new(command: &'static str, family: Option<String>, params: &impl Serialize, run: &RunArgs) -> Self {
        Self {
            tool: "racgdiv",
            version: VERSION,
            command,
            family,
            params: serde_json::to_value(params).expect("arguments serialize"),
            seed: run.seed,
            out: run.out.display().to_string(),
            threads: run.threads,
            max_vertices: run.max_vertices,
            max_seconds: run.max_seconds,
        }
    }

    fn json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// How a command finished when it did not fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Partial,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Complete => 0,
            Outcome::Partial => 1,
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

pub fn run(command: Command) -> anyhow::Result<Outcome> {
    let threads = match &command {
        Command::Ball(a) => a.run.threads,
        Command::Ldiv(a) => a.run.threads,
        Command::Gersten(a) => a.run.threads,
        Command::Cone(a) => a.run.threads,
        Command::Transitions(a) => a.run.threads,
        Command::Experiment(a) => a.run.threads,
    };
    let go = move || match command {
        Command::Ball(a) => cmd_ball(&a),
        Command::Ldiv(a) => cmd_ldiv(&a),
        Command::Gersten(a) => cmd_gersten(&a),
        Command::Cone(a) => cmd_cone(&a),
        Command::Transitions(a) => cmd_transitions(&a),
        Command::Experiment(a) => cmd_experiment(&a),
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .context("building the worker pool")?
            .install(go),
        None => go(),
    }
}

struct Group {
    graph: Arc<PresentationGraph>,
    label: String,
    family: Option<GroupFamily>,
}

fn load_group(args: &GroupArgs) -> anyhow::Result<Group> {
    if let Some(family) = &args.family {
        let graph = family.build()?.expect("built-in family");
        return Ok(Group {
            graph: Arc::new(graph),
            label: family.to_string(),
            family: Some(family.clone()),
        });
    }
    let path = args.graph.as_ref().ok_or_else(|| anyhow!("one of --family or --graph is required"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading graph file {}", path.display()))?;
    let graph = PresentationGraph::from_json(&text).with_context(|| format!("graph file {}", path.display()))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Group {
        graph: Arc::new(graph),
        label: format!("custom:{stem}"),
        family: None,
    })
}

fn budget(run: &RunArgs) -> Budget {
    Budget {
        max_vertices: run.max_vertices.map(|v| v as usize),
        max_seconds: run.max_seconds,
    }
}

fn peripheral(group: &Group, args: &PeripheralArgs) -> anyhow::Result<PeripheralStructure> {
    if !args.peripheral.is_empty() {
        let sets = args
            .peripheral
            .iter()
            .map(|s| group.graph.parse_generator_set(s).with_context(|| format!("--peripheral {s:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        return Ok(PeripheralStructure::new(sets));
    }
    match group.family {
        Some(GroupFamily::Omega { d }) => Ok(PeripheralStructure::omega(&group.graph, d)?),
        _ => Err(anyhow!("--peripheral is required unless --family is omega:<d>")),
    }
}

fn file_label(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .replace("__", "_")
}

fn create_out_dir(run: &RunArgs) -> anyhow::Result<()> {
    fs::create_dir_all(&run.out).with_context(|| format!("creating output directory {}", run.out.display()))
}

/// CSV writer whose first lines are `#` comments carrying the tool version
/// and the run configuration.
fn csv_writer(path: &Path, config: &RunConfig) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# racgdiv {VERSION}")?;
    writeln!(w, "# config: {}", config.json_line())?;
    Ok(csv::Writer::from_writer(w))
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn report_budget(stats: &Option<PartialStats>) -> Outcome {
    match stats {
        Some(s) => {
            eprintln!(
                "budget exceeded after enumerating {} vertices; radius {} completed, partial output kept",
                s.vertices, s.completed_radius
            );
            Outcome::Partial
        }
        None => Outcome::Complete,
    }
}

pub fn cmd_ball(args: &BallArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&args.group)?;
    let config = RunConfig::new("ball", Some(group.label.clone()), args, &args.run);
    create_out_dir(&args.run)?;
    let (ball, stats) = build_ball_partial(group.graph.clone(), NormalForm::identity(), args.radius, budget(&args.run));
    let path = args
        .run
        .out
        .join(format!("ball-{}-r{}.csv", file_label(&group.label), args.radius));
    let mut w = csv_writer(&path, &config)?;
    w.write_record(["r", "sphere_size", "ball_size"])?;
    let mut total = 0;
    for (r, size) in ball.sphere_sizes().into_iter().enumerate() {
        total += size;
        w.write_record([r.to_string(), size.to_string(), total.to_string()])?;
    }
    w.flush()?;
    println!("{}", path.display());
    Ok(report_budget(&stats))
}

fn parse_spec(graph: &PresentationGraph, word: &str, anchor: &str) -> anyhow::Result<GeodesicSpec> {
    let period = graph.parse_word(word).with_context(|| format!("--word {word:?}"))?;
    let anchor = graph.parse_element(anchor).with_context(|| format!("--anchor {anchor:?}"))?;
    Ok(GeodesicSpec::new(graph, period, anchor)?)
}

/// Identity ball of radius `factor · r_max`, and the largest `r` it serves
/// when the budget cut it short.
fn probe_ball(group: &Group, factor: u32, r_max: u32, run: &RunArgs) -> (CayleyBall, u32, Option<PartialStats>) {
    let (ball, stats) = build_ball_partial(group.graph.clone(), NormalForm::identity(), factor * r_max, budget(run));
    let served = if stats.is_some() { ball.radius() / factor } else { r_max };
    (ball, served, stats)
}

fn status_cells(status: &SampleStatus) -> (String, String) {
    let value = match *status {
        SampleStatus::Finite { value } => value.to_string(),
        SampleStatus::Mixed { finite_min, .. } => finite_min.to_string(),
        SampleStatus::NoPathWithinTruncation => String::new(),
    };
    (status.label().to_string(), value)
}

#[derive(Serialize)]
struct FitFile<'a> {
    config: &'a RunConfig,
    fit: racgdiv_core::divergence::GrowthFit,
    morse: racgdiv_core::experiments::MorseAssessment,
    samples: &'a [DivergenceSample],
    budget_exceeded: &'a Option<PartialStats>,
}

fn check_range(r_min: u32, r_max: u32) -> anyhow::Result<()> {
    if r_min > r_max {
        return Err(anyhow!("--r-min {r_min} exceeds --r-max {r_max}"));
    }
    Ok(())
}

pub fn cmd_ldiv(args: &LdivArgs) -> anyhow::Result<Outcome> {
    check_range(args.r_min, args.r_max)?;
    let group = load_group(&args.group)?;
    let spec = parse_spec(&group.graph, &args.word, &args.anchor)?;
    let config = RunConfig::new("ldiv", Some(group.label.clone()), args, &args.run);
    create_out_dir(&args.run)?;
    let geodesic = format!("({})^∞", group.graph.format_word(spec.period()));
    let (ball, served, stats) = probe_ball(&group, args.trunc_factor, args.r_max, &args.run);

    let stem = format!(
        "ldiv-{}-{}-r{}-{}",
        file_label(&group.label),
        file_label(&group.graph.format_word(spec.period())),
        args.r_min,
        args.r_max
    );
    let csv_path = args.run.out.join(format!("{stem}.csv"));
    let mut w = csv_writer(&csv_path, &config)?;
    w.write_record(["family", "geodesic", "r", "t", "status", "value", "truncation", "wall_ms"])?;
    let mut samples = Vec::new();
    for r in args.r_min..=served {
        let start = Instant::now();
        let s = ldiv_in(&ball, &spec, r, args.trunc_factor * r)?;
        let wall_ms = start.elapsed().as_millis();
        let (status, value) = status_cells(&s.status);
        w.write_record([
            group.label.clone(),
            geodesic.clone(),
            r.to_string(),
            s.provenance.t.map(|t| t.to_string()).unwrap_or_default(),
            status,
            value,
            s.truncation_radius.to_string(),
            wall_ms.to_string(),
        ])?;
        samples.push(s);
    }
    w.flush()?;

    let fit = fit_growth(&samples);
    let fit_path = args.run.out.join(format!("{stem}.fit.json"));
    write_json(
        &fit_path,
        &FitFile {
            config: &config,
            morse: morse_heuristic(&fit),
            fit,
            samples: &samples,
            budget_exceeded: &stats,
        },
    )?;
    println!("{}\n{}", csv_path.display(), fit_path.display());
    Ok(report_budget(&stats))
}

pub fn cmd_gersten(args: &GerstenArgs) -> anyhow::Result<Outcome> {
    check_range(args.r_min, args.r_max)?;
    let group = load_group(&args.group)?;
    let config = RunConfig::new("gersten", Some(group.label.clone()), args, &args.run);
    create_out_dir(&args.run)?;
    let (ball, stats) = build_ball_partial(
        group.graph.clone(),
        NormalForm::identity(),
        args.trunc_factor * args.r_max,
        budget(&args.run),
    );
    // A sphere is usable once the ball extends past it by the same factor.
    let served = if stats.is_some() { ball.radius() / args.trunc_factor } else { args.r_max };
    let sampling = match args.sampling {
        SamplingMode::Exhaustive => PairSampling::Exhaustive,
        SamplingMode::Sampled => PairSampling::Sampled {
            pairs: args.pairs as usize,
            seed: args.run.seed,
        },
        SamplingMode::Auto => PairSampling::Auto {
            threshold: racgdiv_core::divergence::DEFAULT_PAIR_CAP,
            pairs: args.pairs as usize,
            seed: args.run.seed,
        },
    };
    let stem = format!(
        "gersten-{}-rho{}_{}-r{}-{}",
        file_label(&group.label),
        args.rho.num,
        args.rho.den,
        args.r_min,
        args.r_max
    );
    let csv_path = args.run.out.join(format!("{stem}.csv"));
    let mut w = csv_writer(&csv_path, &config)?;
    w.write_record([
        "family",
        "r",
        "rho",
        "annulus_radius",
        "sphere_size",
        "pairs_evaluated",
        "pairs_no_path",
        "mode",
        "seed",
        "status",
        "value",
        "truncation",
        "wall_ms",
    ])?;
    let mut samples = Vec::new();
    for r in args.r_min..=served {
        let start = Instant::now();
        let s = gersten_delta(&ball, args.rho, r, sampling)?;
        let wall_ms = start.elapsed().as_millis();
        let g = s.provenance.gersten.clone().expect("gersten provenance");
        let (status, value) = status_cells(&s.status);
        w.write_record([
            group.label.clone(),
            r.to_string(),
            format!("{}/{}", args.rho.num, args.rho.den),
            g.annulus_radius.to_string(),
            g.sphere_size.to_string(),
            g.pairs_evaluated.to_string(),
            g.pairs_no_path.to_string(),
            g.mode.clone(),
            g.seed.map(|x| x.to_string()).unwrap_or_default(),
            status,
            value,
            s.truncation_radius.to_string(),
            wall_ms.to_string(),
        ])?;
        samples.push(s);
    }
    w.flush()?;
    let fit = fit_growth(&samples);
    let fit_path = args.run.out.join(format!("{stem}.fit.json"));
    write_json(
        &fit_path,
        &FitFile {
            config: &config,
            morse: morse_heuristic(&fit),
            fit,
            samples: &samples,
            budget_exceeded: &stats,
        },
    )?;
    println!("{}\n{}", csv_path.display(), fit_path.display());
    Ok(report_budget(&stats))
}

#[derive(Serialize)]
struct DistanceOut {
    from: String,
    to: String,
    coned_distance: String,
    cayley_distance: usize,
}

#[derive(Serialize)]
struct ConeFile<'a> {
    config: &'a RunConfig,
    coned_ball: serde_json::Value,
    distances: Vec<DistanceOut>,
    budget_exceeded: &'a Option<PartialStats>,
}

pub fn cmd_cone(args: &ConeArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&args.group)?;
    let p = peripheral(&group, &args.peripheral)?;
    let queries = args
        .distance
        .iter()
        .map(|q| {
            let (u, v) = q
                .split_once(':')
                .ok_or_else(|| anyhow!("--distance {q:?}: expected u:v"))?;
            let parse = |x: &str| group.graph.parse_element(x).with_context(|| format!("--distance {q:?}"));
            Ok((parse(u)?, parse(v)?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let config = RunConfig::new("cone", Some(group.label.clone()), args, &args.run);
    create_out_dir(&args.run)?;
    let (ball, stats) = build_ball_partial(group.graph.clone(), NormalForm::identity(), args.radius, budget(&args.run));
    let cb = build_coned_off(ball, &p);
    let graph = &group.graph;
    let distances = queries
        .iter()
        .map(|(u, v)| {
            let d = cb.coned_distance(cb.group_vertex(u)?, cb.group_vertex(v)?)?;
            Ok(DistanceOut {
                from: graph.format(u),
                to: graph.format(v),
                coned_distance: d.to_string(),
                cayley_distance: graph.distance(u, v),
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let path = args
        .run
        .out
        .join(format!("cone-{}-r{}.json", file_label(&group.label), args.radius));
    write_json(
        &path,
        &ConeFile {
            config: &config,
            coned_ball: cb.to_json(),
            distances,
            budget_exceeded: &stats,
        },
    )?;
    println!("{}", path.display());
    Ok(report_budget(&stats))
}

pub fn cmd_transitions(args: &TransitionArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&args.group)?;
    let p = peripheral(&group, &args.peripheral)?;
    let spec = parse_spec(&group.graph, &args.word, &args.anchor)?;
    let config = RunConfig::new("transitions", Some(group.label.clone()), args, &args.run);
    create_out_dir(&args.run)?;
    let segment = spec.segment(&group.graph, args.from, args.from + args.length as i64);
    let ann = classify_transitions(&group.graph, &segment, &p, args.epsilon, args.big_r)?;
    for w in &ann.warnings {
        eprintln!("warning: {w}");
    }
    let path = args.run.out.join(format!(
        "transitions-{}-{}-len{}-eps{}-R{}.csv",
        file_label(&group.label),
        file_label(&group.graph.format_word(spec.period())),
        args.length,
        args.epsilon,
        args.big_r
    ));
    let mut text = format!("# racgdiv {VERSION}\n# config: {}\n", config.json_line());
    text.push_str(&ann.to_csv(&group.graph));
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    eprintln!("{} deep, {} transition", ann.deep_count(), ann.transition_count());
    Ok(Outcome::Complete)
}

#[derive(Serialize)]
struct ReportFile<'a, R: Serialize> {
    config: &'a RunConfig,
    report: &'a R,
}

/// Writes `<stem>-<hash>.json` and `.md`, where the hash is taken over the
/// JSON bytes; returns the JSON path.
fn write_report(out: &Path, stem: &str, json: &str, markdown: &str) -> anyhow::Result<PathBuf> {
    let digest = Sha256::digest(json.as_bytes());
    let hash: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    let json_path = out.join(format!("{stem}-{hash}.json"));
    let md_path = out.join(format!("{stem}-{hash}.md"));
    fs::write(&json_path, json).with_context(|| format!("writing {}", json_path.display()))?;
    fs::write(&md_path, markdown).with_context(|| format!("writing {}", md_path.display()))?;
    println!("{}\n{}", json_path.display(), md_path.display());
    Ok(json_path)
}

fn report_json(config: &RunConfig, report: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(&ReportFile { config, report }).expect("report serializes");
    text.push('\n');
    text
}

pub fn cmd_experiment(args: &ExperimentArgs) -> anyhow::Result<Outcome> {
    let d_list = if args.d.is_empty() {
        match args.kind {
            ExperimentKind::Spectrum => vec![1, 2],
            ExperimentKind::Gap => vec![1],
        }
    } else {
        args.d.clone()
    };
    let max_d = *d_list.iter().max().expect("non-empty d list");
    let r_max = args.r_max.unwrap_or_else(|| default_r_max(max_d));
    let mut resolved = args.clone();
    resolved.d = d_list.clone();
    resolved.r_max = Some(r_max);
    let config = RunConfig::new("experiment", None, &resolved, &args.run);
    create_out_dir(&args.run)?;
    let budget = budget(&args.run);
    let d_label = d_list.iter().map(u32::to_string).collect::<Vec<_>>().join("-");
    let mut partial = false;
    match args.kind {
        ExperimentKind::Spectrum => {
            let report = run_gamma_spectrum(&d_list, r_max, args.trunc_factor, budget)?;
            partial |= report.is_partial();
            let stem = format!("spectrum-d{d_label}-r{r_max}-f{}", args.trunc_factor);
            write_report(&args.run.out, &stem, &report_json(&config, &report), &report.to_markdown())?;
        }
        ExperimentKind::Gap => {
            let options = GapOptions {
                epsilon: args.epsilon,
                r: args.big_r,
                segment_length: args.length,
            };
            for &d in &d_list {
                let report = run_omega_gap(d, r_max, args.trunc_factor, options, budget)?;
                partial |= report.is_partial();
                let stem = format!(
                    "gap-d{d}-r{r_max}-f{}-eps{}-R{}",
                    args.trunc_factor, args.epsilon, args.big_r
                );
                write_report(&args.run.out, &stem, &report_json(&config, &report), &report.to_markdown())?;
            }
        }
    }
    if partial {
        eprintln!("budget exceeded: partial report written");
        return Ok(Outcome::Partial);
    }
    Ok(Outcome::Complete)
}
