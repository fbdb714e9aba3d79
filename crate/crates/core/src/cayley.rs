//! Truncated Cayley graphs and path queries on them.
//!
//! A [`CayleyBall`] holds every element within `radius` of its basepoint,
//! keyed by normal form and numbered in breadth-first order, so each sphere
//! is a contiguous id range. Queries that ask for shortest paths under an
//! avoidance constraint only ever see the ball; when nothing is found the
//! answer is [`PathStatus::NoPathWithinTruncation`], which does not
//! distinguish a disconnected complement from a path that leaves the ball.

use std::collections::VecDeque;
use std::ops::Range;
use std::sync::Arc;
use std::time::Instant;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::coxeter::{Letter, NormalForm, PresentationGraph, Word};
use crate::error::{Error, PartialStats, Result};

pub type VertexId = u32;

const NONE: VertexId = VertexId::MAX;

/// Caps on ball enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_vertices: Option<usize>,
    pub max_seconds: Option<f64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    graph: Arc<PresentationGraph>,
    base: NormalForm,
    radius: u32,
    vertices: IndexSet<NormalForm>,
    dist: Vec<u32>,
    /// `neighbors[v * k + s]` is the id of `v·s`, or `NONE` outside the ball.
    neighbors: Vec<VertexId>,
    level_starts: Vec<usize>,
}

/// Enumerates the ball of `radius` about `base`, failing if the budget trips.
pub fn build_ball(
    graph: Arc<PresentationGraph>,
    base: NormalForm,
    radius: u32,
    budget: Budget,
) -> Result<CayleyBall> {
    match build_ball_partial(graph, base, radius, budget) {
        (ball, None) => Ok(ball),
        (_, Some(stats)) => Err(Error::BudgetExceeded(stats)),
    }
}

/// Like [`build_ball`], but on budget exhaustion returns the exact ball of
/// the largest radius that was fully enumerated, plus the statistics.
pub fn build_ball_partial(
    graph: Arc<PresentationGraph>,
    base: NormalForm,
    radius: u32,
    budget: Budget,
) -> (CayleyBall, Option<PartialStats>) {
    let k = graph.num_generators();
    let started = Instant::now();
    let mut vertices = IndexSet::new();
    vertices.insert(base.clone());
    let mut dist = vec![0u32];
    let mut neighbors = vec![NONE; k];
    let mut level_starts = vec![0usize, 1];
    let mut exceeded = false;

    'levels: for level in 0..radius {
        let (lo, hi) = (level_starts[level as usize], level_starts[level as usize + 1]);
        for v in lo..hi {
            for s in 0..k {
                if neighbors[v * k + s] != NONE {
                    continue;
                }
                let h = graph.mul_gen(&vertices[v], s as Letter);
                let (w, fresh) = vertices.insert_full(h);
                if fresh {
                    dist.push(level + 1);
                    neighbors.extend(std::iter::repeat_n(NONE, k));
                }
                neighbors[v * k + s] = w as VertexId;
                neighbors[w * k + s] = v as VertexId;
                if fresh && over_budget(&budget, vertices.len(), &started) {
                    exceeded = true;
                    break 'levels;
                }
            }
        }
        level_starts.push(vertices.len());
    }

    let mut ball = CayleyBall {
        graph,
        base,
        radius,
        vertices,
        dist,
        neighbors,
        level_starts,
    };
    if !exceeded {
        return (ball, None);
    }
    let discovered = ball.vertices.len();
    let completed = (ball.level_starts.len() - 2) as u32;
    ball.truncate_to(completed);
    let stats = PartialStats {
        completed_radius: completed,
        vertices: discovered,
        sphere_sizes: ball.sphere_sizes(),
    };
    (ball, Some(stats))
}

fn over_budget(budget: &Budget, n: usize, started: &Instant) -> bool {
    if budget.max_vertices.is_some_and(|m| n > m) {
        return true;
    }
    n.is_multiple_of(4096) && budget.max_seconds.is_some_and(|s| started.elapsed().as_secs_f64() > s)
}

impl CayleyBall {
    fn truncate_to(&mut self, radius: u32) {
        let keep = self.level_starts[radius as usize + 1];
        let k = self.graph.num_generators();
        self.vertices.truncate(keep);
        self.dist.truncate(keep);
        self.neighbors.truncate(keep * k);
        for slot in &mut self.neighbors {
            if *slot != NONE && *slot as usize >= keep {
                *slot = NONE;
            }
        }
        self.level_starts.truncate(radius as usize + 2);
        self.radius = radius;
    }

    pub fn graph(&self) -> &PresentationGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<PresentationGraph> {
        &self.graph
    }

    pub fn base(&self) -> &NormalForm {
        &self.base
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_id(&self, g: &NormalForm) -> Option<VertexId> {
        self.vertices.get_index_of(g).map(|i| i as VertexId)
    }

    fn require(&self, g: &NormalForm) -> Result<VertexId> {
        self.vertex_id(g).ok_or_else(|| {
            Error::NotFound(format!(
                "{} is not in the ball of radius {}",
                self.graph.format(g),
                self.radius
            ))
        })
    }

    pub fn element(&self, v: VertexId) -> &NormalForm {
        &self.vertices[v as usize]
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &NormalForm> {
        self.vertices.iter()
    }

    /// Distance from the basepoint.
    pub fn dist_from_base(&self, v: VertexId) -> u32 {
        self.dist[v as usize]
    }

    pub fn neighbor(&self, v: VertexId, s: Letter) -> Option<VertexId> {
        let k = self.graph.num_generators();
        let w = self.neighbors[v as usize * k + s as usize];
        (w != NONE).then_some(w)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let k = self.graph.num_generators();
        self.neighbors[v as usize * k..(v as usize + 1) * k]
            .iter()
            .copied()
            .filter(|&w| w != NONE)
    }

    /// Ids of the sphere `S_r` about the basepoint.
    pub fn sphere(&self, r: u32) -> Range<VertexId> {
        match self.level_starts.get(r as usize..=r as usize + 1) {
            Some(&[lo, hi]) => lo as VertexId..hi as VertexId,
            _ => 0..0,
        }
    }

    /// `|S_r|` for `r = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.level_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Exact word metric between two ball elements, ball-independent.
    pub fn distance(&self, u: &NormalForm, v: &NormalForm) -> Result<usize> {
        self.require(u)?;
        self.require(v)?;
        Ok(self.graph.distance(u, v))
    }

    /// Shortest path from `u` to `v` through ball vertices at distance `≥ r`
    /// from `center`.
    pub fn avoidant_distance(
        &self,
        u: &NormalForm,
        v: &NormalForm,
        center: &NormalForm,
        r: u32,
    ) -> Result<PathQueryResult> {
        let (iu, iv) = (self.require(u)?, self.require(v)?);
        self.require(center)?;
        if center == &self.base {
            return self.annulus_ids(iu, iv, r, self.radius);
        }
        let graph = &self.graph;
        let du = graph.distance(center, u);
        let dv = graph.distance(center, v);
        if du < r as usize || dv < r as usize {
            return Err(Error::InvalidQuery(format!(
                "endpoints at distances {du}, {dv} from the center; both must be ≥ {r}"
            )));
        }
        let center_inv = graph.inverse(center);
        let allowed = |x: VertexId| graph.mul(&center_inv, self.element(x)).len() >= r as usize;
        Ok(self.path_query(iu, iv, allowed))
    }

    /// Shortest path avoiding the open `r`-ball about the basepoint.
    pub fn annulus_distance(&self, u: &NormalForm, v: &NormalForm, r: u32) -> Result<PathQueryResult> {
        self.annulus_distance_bounded(u, v, r, self.radius)
    }

    /// As [`annulus_distance`](Self::annulus_distance), restricted further to
    /// the sub-ball of radius `outer` (≤ the ball's radius).
    pub fn annulus_distance_bounded(
        &self,
        u: &NormalForm,
        v: &NormalForm,
        r: u32,
        outer: u32,
    ) -> Result<PathQueryResult> {
        let (iu, iv) = (self.require(u)?, self.require(v)?);
        self.annulus_ids(iu, iv, r, outer)
    }

    pub(crate) fn annulus_ids(
        &self,
        u: VertexId,
        v: VertexId,
        r: u32,
        outer: u32,
    ) -> Result<PathQueryResult> {
        let outer = outer.min(self.radius);
        for (name, x) in [("u", u), ("v", v)] {
            let d = self.dist_from_base(x);
            if d < r || d > outer {
                return Err(Error::InvalidQuery(format!(
                    "{name} lies at distance {d} from the basepoint; need {r} ≤ d ≤ {outer}"
                )));
            }
        }
        let mut res = self.path_query(u, v, |x| {
            let d = self.dist[x as usize];
            d >= r && d <= outer
        });
        res.truncation_radius = outer;
        Ok(res)
    }

    fn path_query(
        &self,
        u: VertexId,
        v: VertexId,
        allowed: impl Fn(VertexId) -> bool,
    ) -> PathQueryResult {
        let (status, witness) = match self.constrained_path(u, v, allowed) {
            Some(path) => (
                PathStatus::Finite(path.len() as u32 - 1),
                Some(path.into_iter().map(|x| self.element(x).clone()).collect()),
            ),
            None => (PathStatus::NoPathWithinTruncation, None),
        };
        PathQueryResult {
            status,
            truncation_radius: self.radius,
            witness,
        }
    }

    /// Breadth-first shortest path from `u` to `v` inside the allowed set.
    pub fn constrained_path(
        &self,
        u: VertexId,
        v: VertexId,
        allowed: impl Fn(VertexId) -> bool,
    ) -> Option<Vec<VertexId>> {
        if u == v {
            return Some(vec![u]);
        }
        let mut parent: std::collections::HashMap<VertexId, VertexId> =
            std::collections::HashMap::from([(u, u)]);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if parent.contains_key(&y) || !allowed(y) {
                    continue;
                }
                parent.insert(y, x);
                if y == v {
                    let mut path = vec![v];
                    let mut cur = v;
                    while cur != u {
                        cur = parent[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(y);
            }
        }
        None
    }

    /// Constrained BFS distances from `src` to every ball vertex
    /// (`u32::MAX` where unreachable).
    pub fn constrained_distances(
        &self,
        src: VertexId,
        allowed: impl Fn(VertexId) -> bool,
    ) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.len()];
        d[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let dx = d[x as usize];
            for y in self.neighbors(x) {
                if d[y as usize] == u32::MAX && allowed(y) {
                    d[y as usize] = dx + 1;
                    queue.push_back(y);
                }
            }
        }
        d
    }

    /// Checks that `witness` is a path in the ball whose vertices satisfy
    /// `constraint` and whose endpoints are `u` and `v`.
    pub fn validate_witness(
        &self,
        witness: &[NormalForm],
        u: &NormalForm,
        v: &NormalForm,
        constraint: impl Fn(&NormalForm) -> bool,
    ) -> Result<()> {
        let (first, last) = match (witness.first(), witness.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::InvalidQuery("empty witness".into())),
        };
        if first != u || last != v {
            return Err(Error::InvalidQuery("witness endpoints mismatch".into()));
        }
        for (i, x) in witness.iter().enumerate() {
            self.require(x)?;
            if !constraint(x) {
                return Err(Error::InvalidQuery(format!(
                    "witness vertex {i} ({}) violates the avoidance constraint",
                    self.graph.format(x)
                )));
            }
        }
        for (i, pair) in witness.windows(2).enumerate() {
            if self.graph.distance(&pair[0], &pair[1]) != 1 {
                return Err(Error::InvalidQuery(format!(
                    "witness step {i} is not a Cayley graph edge"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "length")]
pub enum PathStatus {
    Finite(u32),
    NoPathWithinTruncation,
}

impl PathStatus {
    pub fn finite(self) -> Option<u32> {
        match self {
            PathStatus::Finite(n) => Some(n),
            PathStatus::NoPathWithinTruncation => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathQueryResult {
    pub status: PathStatus,
    pub truncation_radius: u32,
    pub witness: Option<Vec<NormalForm>>,
}

/// Witness path as a JSON list of normal-form strings.
pub fn witness_json(graph: &PresentationGraph, witness: &[NormalForm]) -> String {
    let names: Vec<String> = witness.iter().map(|g| graph.format(g)).collect();
    serde_json::to_string(&names).expect("strings serialize")
}

/// Default number of period powers checked for reducedness.
pub const DEFAULT_POWER_CHECK: usize = 6;

/// Bi-infinite geodesic labelled by a periodic word, with `α(0) = anchor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicSpec {
    period: Word,
    anchor: NormalForm,
}

impl GeodesicSpec {
    pub fn new(graph: &PresentationGraph, period: Word, anchor: NormalForm) -> Result<Self> {
        Self::with_power_check(graph, period, anchor, DEFAULT_POWER_CHECK)
    }

    /// Validates that `period^n` is reduced for every `n ≤ powers`.
    pub fn with_power_check(
        graph: &PresentationGraph,
        period: Word,
        anchor: NormalForm,
        powers: usize,
    ) -> Result<Self> {
        graph.check_word(&period)?;
        if period.is_empty() {
            return Err(Error::InvalidParameter("period word is empty".into()));
        }
        let mut power = Vec::with_capacity(period.len() * powers.max(1));
        for n in 1..=powers.max(1) {
            power.extend_from_slice(period.letters());
            if !graph.is_reduced(&Word(power.clone()))? {
                return Err(Error::InvalidParameter(format!(
                    "period not reduced: ({})^{n} is not a geodesic word",
                    graph.format_word(&period)
                )));
            }
        }
        Ok(Self { period, anchor })
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn anchor(&self) -> &NormalForm {
        &self.anchor
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Label of the edge from `α(i)` to `α(i + 1)`.
    pub fn label(&self, i: i64) -> Letter {
        let p = self.period.len() as i64;
        self.period.0[i.rem_euclid(p) as usize]
    }

    /// Letters spelling `α(t)⁻¹ α(t + k)`.
    pub fn local_letters(&self, t: i64, k: i64) -> Vec<Letter> {
        if k >= 0 {
            (t..t + k).map(|i| self.label(i)).collect()
        } else {
            (t + k..t).rev().map(|i| self.label(i)).collect()
        }
    }

    /// `α(t)⁻¹ α(t + k)` as a normal form.
    pub fn local_offset(&self, graph: &PresentationGraph, t: i64, k: i64) -> NormalForm {
        graph.normal_form_of(&self.local_letters(t, k))
    }

    /// `α(t)`.
    pub fn point(&self, graph: &PresentationGraph, t: i64) -> NormalForm {
        let step = graph.normal_form_of(&self.local_letters(0, t));
        graph.mul(&self.anchor, &step)
    }

    /// Points `α(from), …, α(to)`.
    pub fn segment(&self, graph: &PresentationGraph, from: i64, to: i64) -> Vec<NormalForm> {
        let mut cur = self.point(graph, from);
        let mut out = vec![cur.clone()];
        for i in from..to {
            cur = graph.mul_gen(&cur, self.label(i));
            out.push(cur.clone());
        }
        out
    }

    /// The ray `k ↦ α(k)` for `k ≥ 0`.
    pub fn forward_ray(&self) -> Ray {
        Ray {
            origin: self.anchor.clone(),
            period: self.period.clone(),
        }
    }

    /// The ray `k ↦ α(−k)` for `k ≥ 0`.
    pub fn backward_ray(&self) -> Ray {
        let p = self.period.len() as i64;
        Ray {
            origin: self.anchor.clone(),
            period: Word((1..=p).map(|j| self.label(-j)).collect()),
        }
    }
}

/// Geodesic ray `β(k) = origin · w_k`, where `w_k` is the length-`k` prefix of
/// the periodic word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub origin: NormalForm,
    pub period: Word,
}

impl Ray {
    pub fn new(graph: &PresentationGraph, origin: NormalForm, period: Word) -> Result<Self> {
        let spec = GeodesicSpec::new(graph, period, origin)?;
        Ok(spec.forward_ray())
    }

    /// `origin⁻¹ β(k)`.
    pub fn local_offset(&self, graph: &PresentationGraph, k: u32) -> NormalForm {
        let p = self.period.len();
        let letters: Vec<Letter> = (0..k as usize).map(|i| self.period.0[i % p]).collect();
        graph.normal_form_of(&letters)
    }

    pub fn point(&self, graph: &PresentationGraph, k: u32) -> NormalForm {
        graph.mul(&self.origin, &self.local_offset(graph, k))
    }
}
