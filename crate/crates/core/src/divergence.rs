//! Lower divergence, pair divergence and Gersten divergence at finite
//! truncation, plus growth-class fitting of sampled values.
//!
//! All probes run on balls centred at the identity. A probe centred at
//! `α(t)` is left-translated by `α(t)⁻¹`, which is a graph automorphism, so a
//! single ball of radius `truncation` serves every `t`. A larger ball serves
//! smaller truncations by restricting to `dist ≤ truncation`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{build_ball, Budget, CayleyBall, GeodesicSpec, PathStatus, Ray, VertexId};
use crate::coxeter::{NormalForm, PresentationGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Rho,
    Ldiv,
    Pair,
    Gersten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SampleStatus {
    Finite { value: u32 },
    NoPathWithinTruncation,
    /// Some `t` gave finite values, others found no path inside the ball.
    Mixed { finite_min: u32, no_path_count: u32 },
}

impl SampleStatus {
    pub fn finite(self) -> Option<u32> {
        match self {
            SampleStatus::Finite { value } => Some(value),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SampleStatus::Finite { .. } => "finite",
            SampleStatus::NoPathWithinTruncation => "no_path_within_truncation",
            SampleStatus::Mixed { .. } => "mixed",
        }
    }
}

impl From<PathStatus> for SampleStatus {
    fn from(p: PathStatus) -> Self {
        match p {
            PathStatus::Finite(value) => SampleStatus::Finite { value },
            PathStatus::NoPathWithinTruncation => SampleStatus::NoPathWithinTruncation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GerstenStats {
    pub annulus_radius: u32,
    pub sphere_size: usize,
    pub pairs_evaluated: usize,
    pub pairs_no_path: usize,
    pub mode: String,
    pub seed: Option<u64>,
}

/// Where a sample came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_range: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gersten: Option<GerstenStats>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceSample {
    pub kind: SampleKind,
    pub r: u32,
    #[serde(flatten)]
    pub status: SampleStatus,
    pub provenance: Provenance,
    pub truncation_radius: u32,
    pub witness_available: bool,
    #[serde(skip)]
    pub witness: Option<Vec<NormalForm>>,
}

impl DivergenceSample {
    pub fn finite(&self) -> Option<u32> {
        self.status.finite()
    }
}

fn check_identity_ball(ball: &CayleyBall, truncation: u32) -> Result<()> {
    if !ball.base().is_identity() {
        return Err(Error::InvalidQuery("probe balls must be centred at the identity".into()));
    }
    if ball.radius() < truncation {
        return Err(Error::InvalidQuery(format!(
            "ball radius {} is smaller than the truncation {truncation}",
            ball.radius()
        )));
    }
    Ok(())
}

fn check_scale(r: u32, truncation: u32) -> Result<()> {
    if r < 1 {
        return Err(Error::InvalidParameter("r must be ≥ 1".into()));
    }
    if truncation < 2 * r {
        return Err(Error::InvalidParameter(format!(
            "truncation {truncation} must be ≥ 2r = {}",
            2 * r
        )));
    }
    Ok(())
}

fn vertex(ball: &CayleyBall, g: &NormalForm) -> Result<VertexId> {
    ball.vertex_id(g)
        .ok_or_else(|| Error::NotFound(format!("{} outside the ball", ball.graph().format(g))))
}

fn translate(graph: &PresentationGraph, by: &NormalForm, path: Vec<NormalForm>) -> Vec<NormalForm> {
    path.iter().map(|x| graph.mul(by, x)).collect()
}

/// `ρ_α(r, t)` on a prebuilt identity ball of radius `≥ truncation`.
pub fn rho_in(
    ball: &CayleyBall,
    spec: &GeodesicSpec,
    r: u32,
    t: i64,
    truncation: u32,
) -> Result<DivergenceSample> {
    check_scale(r, truncation)?;
    check_identity_ball(ball, truncation)?;
    let graph = ball.graph();
    let u = spec.local_offset(graph, t, -(r as i64));
    let v = spec.local_offset(graph, t, r as i64);
    let res = ball.annulus_ids(vertex(ball, &u)?, vertex(ball, &v)?, r, truncation)?;
    let witness = res
        .witness
        .map(|w| translate(graph, &spec.point(graph, t), w));
    Ok(DivergenceSample {
        kind: SampleKind::Rho,
        r,
        status: res.status.into(),
        provenance: Provenance {
            t: Some(t),
            ..Provenance::default()
        },
        truncation_radius: truncation,
        witness_available: witness.is_some(),
        witness,
    })
}

/// `ρ_α(r, t)`: shortest detour from `α(t − r)` to `α(t + r)` outside the
/// open `r`-ball about `α(t)`, inside the `truncation`-ball about `α(t)`.
pub fn rho(
    graph: &Arc<PresentationGraph>,
    spec: &GeodesicSpec,
    r: u32,
    t: i64,
    truncation: u32,
    budget: Budget,
) -> Result<DivergenceSample> {
    check_scale(r, truncation)?;
    let ball = build_ball(graph.clone(), NormalForm::identity(), truncation, budget)?;
    rho_in(&ball, spec, r, t, truncation)
}

/// `ldiv_α(r)` on a prebuilt identity ball: the minimum of `ρ` over one period.
pub fn ldiv_in(
    ball: &CayleyBall,
    spec: &GeodesicSpec,
    r: u32,
    truncation: u32,
) -> Result<DivergenceSample> {
    let p = spec.period_len() as i64;
    let rhos = (0..p)
        .into_par_iter()
        .map(|t| rho_in(ball, spec, r, t, truncation))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_ldiv(rhos, r, truncation, (0, p - 1)))
}

fn combine_ldiv(
    rhos: Vec<DivergenceSample>,
    r: u32,
    truncation: u32,
    t_range: (i64, i64),
) -> DivergenceSample {
    let no_path = rhos.iter().filter(|s| s.finite().is_none()).count() as u32;
    // First minimum in t order keeps the choice deterministic.
    let best = rhos
        .into_iter()
        .filter(|s| s.finite().is_some())
        .min_by_key(|s| s.finite());
    let (status, t, witness) = match best {
        None => (SampleStatus::NoPathWithinTruncation, None, None),
        Some(s) => {
            let value = s.finite().unwrap();
            let status = if no_path == 0 {
                SampleStatus::Finite { value }
            } else {
                SampleStatus::Mixed {
                    finite_min: value,
                    no_path_count: no_path,
                }
            };
            (status, s.provenance.t, s.witness)
        }
    };
    DivergenceSample {
        kind: SampleKind::Ldiv,
        r,
        status,
        provenance: Provenance {
            t,
            t_range: Some(t_range),
            ..Provenance::default()
        },
        truncation_radius: truncation,
        witness_available: witness.is_some(),
        witness,
    }
}

/// Lower divergence over a user-supplied window of times, for non-periodic
/// use; the result is labelled with the window.
pub fn ldiv_window_in(
    ball: &CayleyBall,
    spec: &GeodesicSpec,
    r: u32,
    truncation: u32,
    window: (i64, i64),
) -> Result<DivergenceSample> {
    if window.0 > window.1 {
        return Err(Error::InvalidParameter("empty t window".into()));
    }
    let rhos = (window.0..=window.1)
        .into_par_iter()
        .map(|t| rho_in(ball, spec, r, t, truncation))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_ldiv(rhos, r, truncation, window))
}

pub fn ldiv(
    graph: &Arc<PresentationGraph>,
    spec: &GeodesicSpec,
    r: u32,
    truncation: u32,
    budget: Budget,
) -> Result<DivergenceSample> {
    check_scale(r, truncation)?;
    let ball = build_ball(graph.clone(), NormalForm::identity(), truncation, budget)?;
    ldiv_in(&ball, spec, r, truncation)
}

/// `Div_{α,β}(r)` on a prebuilt identity ball: detour between `α(r)` and
/// `β(r)` outside the open `r`-ball about the shared origin.
pub fn pair_divergence_in(
    ball: &CayleyBall,
    ray_a: &Ray,
    ray_b: &Ray,
    r: u32,
    truncation: u32,
) -> Result<DivergenceSample> {
    if ray_a.origin != ray_b.origin {
        return Err(Error::InvalidQuery("rays must share their initial point".into()));
    }
    check_scale(r, truncation)?;
    check_identity_ball(ball, truncation)?;
    let graph = ball.graph();
    let u = ray_a.local_offset(graph, r);
    let v = ray_b.local_offset(graph, r);
    let res = ball.annulus_ids(vertex(ball, &u)?, vertex(ball, &v)?, r, truncation)?;
    let witness = res.witness.map(|w| translate(graph, &ray_a.origin, w));
    Ok(DivergenceSample {
        kind: SampleKind::Pair,
        r,
        status: res.status.into(),
        provenance: Provenance {
            pair_id: Some(format!(
                "({})^∞ | ({})^∞",
                graph.format_word(&ray_a.period),
                graph.format_word(&ray_b.period)
            )),
            ..Provenance::default()
        },
        truncation_radius: truncation,
        witness_available: witness.is_some(),
        witness,
    })
}

pub fn pair_divergence(
    graph: &Arc<PresentationGraph>,
    ray_a: &Ray,
    ray_b: &Ray,
    r: u32,
    truncation: u32,
    budget: Budget,
) -> Result<DivergenceSample> {
    if ray_a.origin != ray_b.origin {
        return Err(Error::InvalidQuery("rays must share their initial point".into()));
    }
    check_scale(r, truncation)?;
    let ball = build_ball(graph.clone(), NormalForm::identity(), truncation, budget)?;
    pair_divergence_in(&ball, ray_a, ray_b, r, truncation)
}

/// A fraction in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "fraction {num}/{den} must lie in (0, 1]"
            )));
        }
        Ok(Self { num, den })
    }

    /// `⌈self · r⌉`.
    pub fn ceil_mul(self, r: u32) -> u32 {
        (self.num as u64 * r as u64).div_ceil(self.den as u64) as u32
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a decimal such as `0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as a fraction"));
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            return Self::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        }
        match s.split_once('.') {
            None => Self::new(s.parse().map_err(|_| bad())?, 1),
            Some((int, frac)) => {
                if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let den = 10u32.pow(frac.len() as u32);
                let int: u32 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
                let frac: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
                let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
                let g = gcd(num, den);
                Self::new(num / g.max(1), den / g.max(1))
            }
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// How sphere pairs are chosen for the Gersten supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PairSampling {
    /// Every unordered pair (including `x = x`).
    Exhaustive,
    /// `pairs` unordered pairs drawn uniformly with replacement.
    Sampled { pairs: usize, seed: u64 },
    /// Exhaustive when `|S_r| ≤ threshold`, otherwise sampled.
    Auto {
        threshold: usize,
        pairs: usize,
        seed: u64,
    },
}

pub const DEFAULT_PAIR_CAP: usize = 512;

impl PairSampling {
    pub fn auto(seed: u64) -> Self {
        PairSampling::Auto {
            threshold: DEFAULT_PAIR_CAP,
            pairs: DEFAULT_PAIR_CAP,
            seed,
        }
    }

    fn resolve(self, sphere: usize) -> Self {
        match self {
            PairSampling::Auto { threshold, .. } if sphere <= threshold => PairSampling::Exhaustive,
            PairSampling::Auto { pairs, seed, .. } => PairSampling::Sampled { pairs, seed },
            other => other,
        }
    }
}

/// `δ_ρ(r)`: supremum over pairs of the sphere `S_r` about the ball's
/// basepoint of the detour length outside the open `⌈ρr⌉`-ball, restricted
/// to pairs with a finite answer inside the ball.
pub fn gersten_delta(
    ball: &CayleyBall,
    rho_frac: Fraction,
    r: u32,
    sampling: PairSampling,
) -> Result<DivergenceSample> {
    if ball.radius() < r {
        return Err(Error::InvalidQuery(format!(
            "ball radius {} is smaller than r = {r}",
            ball.radius()
        )));
    }
    let sphere: Vec<VertexId> = ball.sphere(r).collect();
    if sphere.is_empty() {
        return Err(Error::InvalidQuery(format!("sphere of radius {r} is empty")));
    }
    let inner = rho_frac.ceil_mul(r);
    let n = sphere.len();
    let mode = sampling.resolve(n);

    // Pairs grouped by their first index so each source needs one BFS.
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let seed = match mode {
        PairSampling::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                by_source.entry(i.min(j)).or_default().push(i.max(j));
            }
            Some(seed)
        }
        _ => {
            for i in 0..n {
                by_source.insert(i, (i..n).collect());
            }
            None
        }
    };
    let pairs_evaluated: usize = by_source.values().map(Vec::len).sum();
    let allowed = |x: VertexId| ball.dist_from_base(x) >= inner;
    let per_source: Vec<(u32, usize)> = by_source
        .par_iter()
        .map(|(&i, targets)| {
            let d = ball.constrained_distances(sphere[i], allowed);
            targets.iter().fold((0u32, 0usize), |(best, missing), &j| {
                match d[sphere[j] as usize] {
                    u32::MAX => (best, missing + 1),
                    x => (best.max(x), missing),
                }
            })
        })
        .collect();
    let best = per_source.iter().map(|p| p.0).max().unwrap_or(0);
    let pairs_no_path = per_source.iter().map(|p| p.1).sum();
    Ok(DivergenceSample {
        kind: SampleKind::Gersten,
        r,
        status: SampleStatus::Finite { value: best },
        provenance: Provenance {
            gersten: Some(GerstenStats {
                annulus_radius: inner,
                sphere_size: n,
                pairs_evaluated,
                pairs_no_path,
                mode: match mode {
                    PairSampling::Exhaustive => "exhaustive".into(),
                    _ => "sampled".into(),
                },
                seed,
            }),
            ..Provenance::default()
        },
        truncation_radius: ball.radius(),
        witness_available: false,
        witness: None,
    })
}

/// Least-squares line `y = slope·x + intercept` with its coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn least_squares(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * n {
        if ss_res <= f64::EPSILON * n { 1.0 } else { 0.0 }
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Threshold on the coefficient of determination for accepting a model.
pub const FIT_THRESHOLD: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GrowthModel {
    Polynomial { exponent: f64 },
    Exponential { rate: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    #[serde(flatten)]
    pub model: GrowthModel,
    pub r_window: Option<(u32, u32)>,
    /// Coefficient of determination of the chosen model, if any.
    pub residual: Option<f64>,
    /// Fit of `ln v` against `ln r`.
    pub polynomial: Option<LineFit>,
    /// Fit of `ln v` against `r`.
    pub exponential: Option<LineFit>,
    pub points_used: usize,
}

/// Classifies the growth of `(r, value)` points with positive values.
pub fn fit_points(points: &[(u32, f64)]) -> GrowthFit {
    let mut by_r: BTreeMap<u32, f64> = BTreeMap::new();
    for &(r, v) in points {
        if r > 0 && v > 0.0 && v.is_finite() {
            by_r.entry(r)
                .and_modify(|x| *x = x.min(v))
                .or_insert(v);
        }
    }
    let r_window = by_r
        .keys()
        .next()
        .zip(by_r.keys().next_back())
        .map(|(a, b)| (*a, *b));
    let inconclusive = GrowthFit {
        model: GrowthModel::Inconclusive,
        r_window,
        residual: None,
        polynomial: None,
        exponential: None,
        points_used: by_r.len(),
    };
    if by_r.len() < 3 {
        return inconclusive;
    }
    let loglog: Vec<(f64, f64)> = by_r.iter().map(|(&r, &v)| ((r as f64).ln(), v.ln())).collect();
    let semilog: Vec<(f64, f64)> = by_r.iter().map(|(&r, &v)| (r as f64, v.ln())).collect();
    let polynomial = least_squares(&loglog);
    let exponential = least_squares(&semilog);
    let accept = |f: &Option<LineFit>| {
        f.filter(|f| f.r_squared >= FIT_THRESHOLD && f.slope.is_finite() && f.slope > 0.0)
    };
    let (model, residual) = if let Some(f) = accept(&polynomial) {
        (GrowthModel::Polynomial { exponent: f.slope }, Some(f.r_squared))
    } else if let Some(f) = accept(&exponential) {
        (GrowthModel::Exponential { rate: f.slope }, Some(f.r_squared))
    } else {
        (GrowthModel::Inconclusive, None)
    };
    GrowthFit {
        model,
        residual,
        polynomial,
        exponential,
        ..inconclusive
    }
}

/// Fits the finite samples; mixed and no-path samples are ignored.
pub fn fit_growth(samples: &[DivergenceSample]) -> GrowthFit {
    let points: Vec<(u32, f64)> = samples
        .iter()
        .filter_map(|s| s.finite().map(|v| (s.r, v as f64)))
        .collect();
    fit_points(&points)
}
