//! Packaged desk-scale experiments: lower divergence of `α_d = (a_d b_d)^∞`
//! across `Γ_d`, and the peripheral-versus-candidate comparison in `Ω_d`.
//!
//! Reports are plain data with deterministic field order; the JSON of two
//! runs with the same parameters is byte-identical.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{build_ball_partial, Budget, CayleyBall, GeodesicSpec};
use crate::coxeter::{build_family, FamilyKind, NormalForm, PresentationGraph};
use crate::divergence::{fit_growth, ldiv_in, DivergenceSample, GrowthFit, GrowthModel};
use crate::error::{Error, PartialStats, Result};
use crate::relhyp::{classify_transitions, PeripheralStructure, PointStatus, TransitionAnnotation};

pub const DEFAULT_TRUNCATION_FACTOR: u32 = 3;
pub const DEFAULT_EPSILON: u32 = 1;
pub const DEFAULT_R: u32 = 2;
pub const DEFAULT_SEGMENT_LENGTH: usize = 11;

/// Default `r_max` for a given `d`.
pub fn default_r_max(d: u32) -> u32 {
    if d <= 2 {
        4
    } else {
        3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseClass {
    MorseConsistent,
    NonMorseConsistent,
    Inconclusive,
}

impl std::fmt::Display for MorseClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MorseClass::MorseConsistent => "morse-consistent",
            MorseClass::NonMorseConsistent => "non-morse-consistent",
            MorseClass::Inconclusive => "inconclusive",
        })
    }
}

/// Superlinear-growth heuristic for Morse-ness. Not a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseAssessment {
    pub class: MorseClass,
    pub label: String,
}

pub const MORSE_LABEL: &str =
    "heuristic: polynomial exponent >= 1.5 or exponential fit => morse-consistent; exponent <= 1.2 => non-morse-consistent";

pub fn morse_heuristic(fit: &GrowthFit) -> MorseAssessment {
    let class = match fit.model {
        GrowthModel::Exponential { .. } => MorseClass::MorseConsistent,
        GrowthModel::Polynomial { exponent } if exponent >= 1.5 => MorseClass::MorseConsistent,
        GrowthModel::Polynomial { exponent } if exponent <= 1.2 => MorseClass::NonMorseConsistent,
        _ => MorseClass::Inconclusive,
    };
    MorseAssessment {
        class,
        label: MORSE_LABEL.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSeries {
    pub geodesic: String,
    pub samples: Vec<DivergenceSample>,
    pub fit: GrowthFit,
    pub morse: MorseAssessment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub d: u32,
    pub ball_radius: u32,
    pub ball_size: usize,
    #[serde(flatten)]
    pub series: GeodesicSeries,
    pub budget_exceeded: Option<PartialStats>,
}

/// `ldiv̂` of two families compared at the same `r` and truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub r: u32,
    pub d_low: u32,
    pub d_high: u32,
    pub value_low: Option<u32>,
    pub value_high: Option<u32>,
    /// `value_low ≤ value_high`, when both are finite.
    pub ordered: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumParams {
    pub d_list: Vec<u32>,
    pub r_max: u32,
    pub truncation_factor: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub experiment: &'static str,
    pub params: SpectrumParams,
    pub entries: Vec<SpectrumEntry>,
    pub comparisons: Vec<Comparison>,
}

impl SpectrumReport {
    pub fn is_partial(&self) -> bool {
        self.entries.iter().any(|e| e.budget_exceeded.is_some())
    }

    pub fn ldiv(&self, d: u32, r: u32) -> Option<&DivergenceSample> {
        self.entries
            .iter()
            .find(|e| e.d == d)?
            .series
            .samples
            .iter()
            .find(|s| s.r == r)
    }
}

fn check_params(r_max: u32, min_r_max: u32, factor: u32) -> Result<()> {
    if r_max < min_r_max {
        return Err(Error::InvalidParameter(format!("r_max must be ≥ {min_r_max}")));
    }
    if factor < 2 {
        return Err(Error::InvalidParameter(
            "truncation factor must be ≥ 2 (ρ needs truncation ≥ 2r)".into(),
        ));
    }
    Ok(())
}

/// Identity ball large enough for `r ≤ r_max`, or the largest complete one
/// within budget together with the `r` values it can serve.
fn probe_ball(
    graph: &Arc<PresentationGraph>,
    r_max: u32,
    factor: u32,
    budget: Budget,
) -> (CayleyBall, u32, Option<PartialStats>) {
    let (ball, stats) = build_ball_partial(graph.clone(), NormalForm::identity(), factor * r_max, budget);
    let served = if stats.is_some() { ball.radius() / factor } else { r_max };
    (ball, served, stats)
}

fn ldiv_series(
    ball: &CayleyBall,
    spec: &GeodesicSpec,
    r_served: u32,
    factor: u32,
) -> Result<GeodesicSeries> {
    let graph = ball.graph();
    let samples = (1..=r_served)
        .into_par_iter()
        .map(|r| ldiv_in(ball, spec, r, factor * r))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_growth(&samples);
    let morse = morse_heuristic(&fit);
    Ok(GeodesicSeries {
        geodesic: format!("({})^∞", graph.format_word(spec.period())),
        samples,
        fit,
        morse,
    })
}

fn alpha(graph: &PresentationGraph, d: u32) -> Result<GeodesicSpec> {
    let word = graph.parse_word(&format!("a{d} b{d}"))?;
    GeodesicSpec::new(graph, word, NormalForm::identity())
}

/// Lower divergence of `α_d` in `Γ_d` for each `d`, at `r = 1..=r_max` with
/// truncation `truncation_factor · r`.
pub fn run_gamma_spectrum(
    d_list: &[u32],
    r_max: u32,
    truncation_factor: u32,
    budget: Budget,
) -> Result<SpectrumReport> {
    check_params(r_max, 2, truncation_factor)?;
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(Error::InvalidParameter("d_list entries must be ≥ 1".into()));
    }
    let mut entries = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let graph = Arc::new(build_family(FamilyKind::Gamma, d)?);
        let spec = alpha(&graph, d)?;
        let (ball, served, stats) = probe_ball(&graph, r_max, truncation_factor, budget);
        let series = ldiv_series(&ball, &spec, served, truncation_factor)?;
        entries.push(SpectrumEntry {
            d,
            ball_radius: ball.radius(),
            ball_size: ball.len(),
            series,
            budget_exceeded: stats,
        });
    }
    let mut comparisons = Vec::new();
    for r in 1..=r_max {
        for (i, lo) in entries.iter().enumerate() {
            for hi in &entries[i + 1..] {
                let value_of = |e: &SpectrumEntry| {
                    e.series.samples.iter().find(|s| s.r == r).and_then(|s| s.finite())
                };
                let (a, b) = (value_of(lo), value_of(hi));
                comparisons.push(Comparison {
                    r,
                    d_low: lo.d.min(hi.d),
                    d_high: lo.d.max(hi.d),
                    value_low: if lo.d <= hi.d { a } else { b },
                    value_high: if lo.d <= hi.d { b } else { a },
                    ordered: a.zip(b).map(|(x, y)| if lo.d <= hi.d { x <= y } else { y <= x }),
                });
            }
        }
    }
    Ok(SpectrumReport {
        experiment: "gamma_spectrum",
        params: SpectrumParams {
            d_list: d_list.to_vec(),
            r_max,
            truncation_factor,
        },
        entries,
        comparisons,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub position: usize,
    pub status: &'static str,
    pub coset_min_rep: Option<String>,
    pub also_deep: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentClassification {
    pub segment_length: usize,
    pub deep: usize,
    pub transition: usize,
    pub points: Vec<PointRow>,
    pub warnings: Vec<String>,
}

impl SegmentClassification {
    fn from_annotation(graph: &PresentationGraph, ann: &TransitionAnnotation) -> Self {
        Self {
            segment_length: ann.points.len().saturating_sub(1),
            deep: ann.deep_count(),
            transition: ann.transition_count(),
            points: ann
                .points
                .iter()
                .map(|p| PointRow {
                    position: p.position,
                    status: match p.status {
                        PointStatus::Deep(_) => "deep",
                        PointStatus::Transition => "transition",
                    },
                    coset_min_rep: match &p.status {
                        PointStatus::Deep(c) => Some(graph.format(&c.min_rep)),
                        PointStatus::Transition => None,
                    },
                    also_deep: p.also_deep.len(),
                })
                .collect(),
            warnings: ann.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSide {
    #[serde(flatten)]
    pub series: GeodesicSeries,
    pub classification: SegmentClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub r: u32,
    pub truncation: u32,
    pub peripheral: Option<u32>,
    pub candidate: Option<u32>,
    /// `candidate / peripheral`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapParams {
    pub d: u32,
    pub r_max: u32,
    pub truncation_factor: u32,
    pub epsilon: u32,
    #[serde(rename = "R")]
    pub r: u32,
    pub segment_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub experiment: &'static str,
    pub params: GapParams,
    pub ball_radius: u32,
    pub ball_size: usize,
    pub peripheral: GapSide,
    pub candidate: GapSide,
    pub ratios: Vec<RatioRow>,
    pub budget_exceeded: Option<PartialStats>,
}

impl GapReport {
    pub fn is_partial(&self) -> bool {
        self.budget_exceeded.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapOptions {
    pub epsilon: u32,
    pub r: u32,
    pub segment_length: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            r: DEFAULT_R,
            segment_length: DEFAULT_SEGMENT_LENGTH,
        }
    }
}

/// Lower divergence and deep/transition structure of `α_d` (inside the
/// peripheral subgroup `Γ_d`) and of the candidate `h_d = (c1 b0)^∞` in `Ω_d`.
pub fn run_omega_gap(
    d: u32,
    r_max: u32,
    truncation_factor: u32,
    options: GapOptions,
    budget: Budget,
) -> Result<GapReport> {
    check_params(r_max, 1, truncation_factor)?;
    let graph = Arc::new(build_family(FamilyKind::Omega, d)?);
    let peripheral = PeripheralStructure::omega(&graph, d)?;
    let alpha = alpha(&graph, d)?;
    let candidate = GeodesicSpec::new(&graph, graph.parse_word("c1 b0")?, NormalForm::identity())?;

    let (ball, served, stats) = probe_ball(&graph, r_max, truncation_factor, budget);
    let len = options.segment_length as i64;
    let side = |spec: &GeodesicSpec| -> Result<GapSide> {
        let series = ldiv_series(&ball, spec, served, truncation_factor)?;
        let seg = spec.segment(&graph, 0, len);
        let ann = classify_transitions(&graph, &seg, &peripheral, options.epsilon, options.r)?;
        Ok(GapSide {
            series,
            classification: SegmentClassification::from_annotation(&graph, &ann),
        })
    };
    let peripheral_side = side(&alpha)?;
    let candidate_side = side(&candidate)?;
    let ratios = (1..=served)
        .map(|r| {
            let find = |s: &GapSide| s.series.samples.iter().find(|x| x.r == r).and_then(|x| x.finite());
            let (p, c) = (find(&peripheral_side), find(&candidate_side));
            RatioRow {
                r,
                truncation: truncation_factor * r,
                peripheral: p,
                candidate: c,
                ratio: p.zip(c).filter(|(p, _)| *p > 0).map(|(p, c)| c as f64 / p as f64),
            }
        })
        .collect();
    Ok(GapReport {
        experiment: "omega_gap",
        params: GapParams {
            d,
            r_max,
            truncation_factor,
            epsilon: options.epsilon,
            r: options.r,
            segment_length: options.segment_length,
        },
        ball_radius: ball.radius(),
        ball_size: ball.len(),
        peripheral: peripheral_side,
        candidate: candidate_side,
        ratios,
        budget_exceeded: stats,
    })
}

fn cell(v: Option<u32>) -> String {
    v.map_or_else(|| "—".to_string(), |x| x.to_string())
}

fn sample_cell(s: &DivergenceSample) -> String {
    match s.status {
        crate::divergence::SampleStatus::Finite { value } => value.to_string(),
        crate::divergence::SampleStatus::NoPathWithinTruncation => "no path".into(),
        crate::divergence::SampleStatus::Mixed { finite_min, .. } => format!("mixed ({finite_min})"),
    }
}

fn fit_cell(fit: &GrowthFit) -> String {
    match fit.model {
        GrowthModel::Polynomial { exponent } => format!("polynomial, exponent {exponent:.3}"),
        GrowthModel::Exponential { rate } => format!("exponential, rate {rate:.3}"),
        GrowthModel::Inconclusive => "inconclusive".into(),
    }
}

impl SpectrumReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Lower divergence of α_d in Γ_d\n");
        let _ = writeln!(
            out,
            "d = {:?}, r = 1..{}, truncation = {}·r\n",
            self.params.d_list, self.params.r_max, self.params.truncation_factor
        );
        let _ = write!(out, "| r |");
        for e in &self.entries {
            let _ = write!(out, " d = {} |", e.d);
        }
        let _ = write!(out, "\n|---|");
        for _ in &self.entries {
            let _ = write!(out, "---|");
        }
        out.push('\n');
        for r in 1..=self.params.r_max {
            let _ = write!(out, "| {r} |");
            for e in &self.entries {
                let v = e.series.samples.iter().find(|s| s.r == r).map(sample_cell);
                let _ = write!(out, " {} |", v.unwrap_or_else(|| "—".into()));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "\n| d | fit | morse (heuristic) | ball radius | ball size |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                e.d,
                fit_cell(&e.series.fit),
                e.series.morse.class,
                e.ball_radius,
                e.ball_size
            );
        }
        if self.is_partial() {
            let _ = writeln!(out, "\nBudget exceeded: partial report.");
        }
        out
    }
}

impl GapReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "# Peripheral vs candidate geodesic in Ω_{}\n", p.d);
        let _ = writeln!(
            out,
            "truncation = {}·r, (ε, R) = ({}, {}), segment length {}\n",
            p.truncation_factor, p.epsilon, p.r, p.segment_length
        );
        let _ = writeln!(
            out,
            "| r | truncation | {} | {} | ratio |",
            self.peripheral.series.geodesic, self.candidate.series.geodesic
        );
        let _ = writeln!(out, "|---|---|---|---|---|");
        for row in &self.ratios {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                row.r,
                row.truncation,
                cell(row.peripheral),
                cell(row.candidate),
                row.ratio.map_or_else(|| "—".into(), |x| format!("{x:.3}"))
            );
        }
        let _ = writeln!(out, "\n| geodesic | fit | morse (heuristic) | deep | transition |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for side in [&self.peripheral, &self.candidate] {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                side.series.geodesic,
                fit_cell(&side.series.fit),
                side.series.morse.class,
                side.classification.deep,
                side.classification.transition
            );
        }
        if self.is_partial() {
            let _ = writeln!(out, "\nBudget exceeded: partial report.");
        }
        out
    }
}
