//! Peripheral cosets, coned-off Cayley balls and deep/transition points.
//!
//! Peripheral subgroups are special subgroups `H_T`. A left coset `gH_T` is
//! named by its minimal-length element, so coset identity is normal-form
//! equality. The coned-off ball adds one cone vertex per coset meeting the
//! ball and joins it to every member by an edge of length 1/2; lengths are
//! kept in half-units so every distance is exact.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cayley::{CayleyBall, VertexId};
use crate::coxeter::{gamma_subset, GeneratorSet, NormalForm, PresentationGraph};
use crate::error::{Error, Result};

/// The finite collection of peripheral subgroups, each given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeripheralStructure {
    pub subgroups: Vec<GeneratorSet>,
}

impl PeripheralStructure {
    pub fn new(subgroups: Vec<GeneratorSet>) -> Self {
        Self { subgroups }
    }

    /// `{G_{Γ_d}}` inside `Ω_d`.
    pub fn omega(graph: &PresentationGraph, d: u32) -> Result<Self> {
        Ok(Self::new(vec![gamma_subset(graph, d)?]))
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }
}

/// The left coset `g·P_i`, named by its minimal representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeripheralCoset {
    pub subgroup_index: usize,
    pub min_rep: NormalForm,
}

impl PeripheralCoset {
    pub fn of(graph: &PresentationGraph, g: &NormalForm, p: &PeripheralStructure, i: usize) -> Self {
        Self {
            subgroup_index: i,
            min_rep: graph.coset_min_rep(g, &p.subgroups[i]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetCount {
    pub coset: PeripheralCoset,
    pub members: usize,
}

/// Every peripheral coset meeting the ball, with member counts, sorted by
/// subgroup index then ShortLex order of the representative.
pub fn enumerate_cosets(ball: &CayleyBall, p: &PeripheralStructure) -> Vec<CosetCount> {
    let (cosets, members, _) = coset_table(ball, p);
    cosets
        .into_iter()
        .zip(members)
        .map(|(coset, m)| CosetCount {
            coset,
            members: m.len(),
        })
        .collect()
}

type CosetTable = (Vec<PeripheralCoset>, Vec<Vec<VertexId>>, Vec<u32>);

fn coset_table(ball: &CayleyBall, p: &PeripheralStructure) -> CosetTable {
    let graph = ball.graph();
    let n = ball.len();
    let m = p.len();
    let mut keyed: Vec<(PeripheralCoset, VertexId)> = Vec::with_capacity(n * m);
    for v in 0..n as VertexId {
        for i in 0..m {
            keyed.push((PeripheralCoset::of(graph, ball.element(v), p, i), v));
        }
    }
    keyed.sort();
    let mut cosets: Vec<PeripheralCoset> = Vec::new();
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    let mut vertex_cones = vec![0u32; n * m];
    for (coset, v) in keyed {
        if cosets.last() != Some(&coset) {
            cosets.push(coset.clone());
            members.push(Vec::new());
        }
        let id = cosets.len() - 1;
        members[id].push(v);
        vertex_cones[v as usize * m + coset.subgroup_index] = id as u32;
    }
    (cosets, members, vertex_cones)
}

/// Length in half-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfLength(pub u32);

impl HalfLength {
    pub fn halves(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn whole(n: u32) -> Self {
        Self(2 * n)
    }
}

impl fmt::Display for HalfLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConedVertex {
    Group(VertexId),
    Cone(u32),
}

/// Cayley ball plus one cone vertex per peripheral coset meeting it.
#[derive(Debug, Clone)]
pub struct ConedOffBall {
    base: CayleyBall,
    structure: PeripheralStructure,
    cosets: Vec<PeripheralCoset>,
    members: Vec<Vec<VertexId>>,
    vertex_cones: Vec<u32>,
}

pub fn build_coned_off(ball: CayleyBall, p: &PeripheralStructure) -> ConedOffBall {
    let (cosets, members, vertex_cones) = coset_table(&ball, p);
    ConedOffBall {
        base: ball,
        structure: p.clone(),
        cosets,
        members,
        vertex_cones,
    }
}

#[derive(Serialize)]
struct ConeVertexOut {
    id: usize,
    min_rep: String,
    subgroup_index: usize,
}

#[derive(Serialize)]
struct ConedBallOut {
    group_vertices: Vec<String>,
    cone_vertices: Vec<ConeVertexOut>,
    /// `[from, to, length]`; cone vertex ids follow the group vertex ids.
    edges: Vec<(usize, usize, String)>,
}

impl ConedOffBall {
    pub fn base(&self) -> &CayleyBall {
        &self.base
    }

    pub fn structure(&self) -> &PeripheralStructure {
        &self.structure
    }

    pub fn cosets(&self) -> &[PeripheralCoset] {
        &self.cosets
    }

    pub fn num_cones(&self) -> usize {
        self.cosets.len()
    }

    /// Ball vertices joined to cone `c`.
    pub fn members(&self, c: u32) -> &[VertexId] {
        &self.members[c as usize]
    }

    /// Cone ids adjacent to group vertex `v`, one per subgroup.
    pub fn cones_of(&self, v: VertexId) -> &[u32] {
        let m = self.structure.len();
        &self.vertex_cones[v as usize * m..(v as usize + 1) * m]
    }

    pub fn cone_id(&self, coset: &PeripheralCoset) -> Option<u32> {
        self.cosets.binary_search(coset).ok().map(|i| i as u32)
    }

    pub fn group_vertex(&self, g: &NormalForm) -> Result<ConedVertex> {
        self.base.vertex_id(g).map(ConedVertex::Group).ok_or_else(|| {
            Error::NotFound(format!("{} is not in the coned ball", self.base.graph().format(g)))
        })
    }

    fn node(&self, v: ConedVertex) -> Result<usize> {
        let n = self.base.len();
        match v {
            ConedVertex::Group(x) if (x as usize) < n => Ok(x as usize),
            ConedVertex::Cone(c) if (c as usize) < self.cosets.len() => Ok(n + c as usize),
            other => Err(Error::NotFound(format!("{other:?} is not in the coned ball"))),
        }
    }

    fn vertex_of(&self, node: usize) -> ConedVertex {
        let n = self.base.len();
        if node < n {
            ConedVertex::Group(node as VertexId)
        } else {
            ConedVertex::Cone((node - n) as u32)
        }
    }

    /// Weighted neighbours of a node, lengths in half-units.
    fn adjacent(&self, node: usize, mut f: impl FnMut(usize, u32)) {
        let n = self.base.len();
        if node < n {
            for w in self.base.neighbors(node as VertexId) {
                f(w as usize, 2);
            }
            for &c in self.cones_of(node as VertexId) {
                f(n + c as usize, 1);
            }
        } else {
            for &w in &self.members[node - n] {
                f(w as usize, 1);
            }
        }
    }

    /// Edge length between two coned vertices, if adjacent.
    pub fn edge_length(&self, a: ConedVertex, b: ConedVertex) -> Option<HalfLength> {
        let (a, b) = (self.node(a).ok()?, self.node(b).ok()?);
        let mut found = None;
        self.adjacent(a, |w, len| {
            if w == b {
                found = Some(HalfLength(len));
            }
        });
        found
    }

    fn dijkstra(&self, src: usize, dst: usize) -> Option<(HalfLength, Vec<usize>)> {
        let total = self.base.len() + self.cosets.len();
        let mut dist = vec![u32::MAX; total];
        let mut parent = vec![usize::MAX; total];
        let mut heap = BinaryHeap::from([Reverse((0u32, src))]);
        dist[src] = 0;
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            if x == dst {
                let mut path = vec![dst];
                let mut cur = dst;
                while cur != src {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some((HalfLength(d), path));
            }
            self.adjacent(x, |w, len| {
                let nd = d + len;
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = x;
                    heap.push(Reverse((nd, w)));
                }
            });
        }
        None
    }

    /// Shortest weighted distance inside the coned ball. An upper bound on
    /// the distance in the full coned-off graph.
    pub fn coned_distance(&self, u: ConedVertex, v: ConedVertex) -> Result<HalfLength> {
        let (a, b) = (self.node(u)?, self.node(v)?);
        self.dijkstra(a, b)
            .map(|(d, _)| d)
            .ok_or_else(|| Error::InvalidQuery("vertices are disconnected in the coned ball".into()))
    }

    pub fn coned_geodesic(&self, u: ConedVertex, v: ConedVertex) -> Result<Vec<ConedVertex>> {
        let (a, b) = (self.node(u)?, self.node(v)?);
        self.dijkstra(a, b)
            .map(|(_, path)| path.into_iter().map(|x| self.vertex_of(x)).collect())
            .ok_or_else(|| Error::InvalidQuery("vertices are disconnected in the coned ball".into()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let graph = self.base.graph();
        let n = self.base.len();
        let mut edges = Vec::new();
        for v in 0..n as VertexId {
            for w in self.base.neighbors(v) {
                if v < w {
                    edges.push((v as usize, w as usize, "1".to_string()));
                }
            }
        }
        for (c, members) in self.members.iter().enumerate() {
            for &v in members {
                edges.push((v as usize, n + c, "1/2".to_string()));
            }
        }
        let out = ConedBallOut {
            group_vertices: self.base.elements().map(|g| graph.format(g)).collect(),
            cone_vertices: self
                .cosets
                .iter()
                .enumerate()
                .map(|(i, c)| ConeVertexOut {
                    id: n + i,
                    min_rep: graph.format(&c.min_rep),
                    subgroup_index: c.subgroup_index,
                })
                .collect(),
            edges,
        };
        serde_json::to_value(out).expect("coned ball serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointStatus {
    Deep(PeripheralCoset),
    Transition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointClass {
    pub position: usize,
    pub status: PointStatus,
    /// Further cosets in which the point is also deep.
    pub also_deep: Vec<PeripheralCoset>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionAnnotation {
    pub epsilon: u32,
    pub r: u32,
    pub points: Vec<PointClass>,
    pub warnings: Vec<String>,
}

impl TransitionAnnotation {
    pub fn deep_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| matches!(p.status, PointStatus::Deep(_)))
            .count()
    }

    pub fn transition_count(&self) -> usize {
        self.points.len() - self.deep_count()
    }

    /// CSV rows `position,status,coset_min_rep,epsilon,R`.
    pub fn to_csv(&self, graph: &PresentationGraph) -> String {
        let mut out = String::from("position,status,coset_min_rep,epsilon,R\n");
        for p in &self.points {
            let (status, rep) = match &p.status {
                PointStatus::Deep(c) => ("deep", graph.format(&c.min_rep)),
                PointStatus::Transition => ("transition", String::new()),
            };
            out.push_str(&format!(
                "{},{status},{rep},{},{}\n",
                p.position, self.epsilon, self.r
            ));
        }
        out
    }
}

/// Checks that consecutive points are adjacent and the endpoints realise
/// the segment length.
pub fn check_geodesic(graph: &PresentationGraph, segment: &[NormalForm]) -> Result<()> {
    for (i, w) in segment.windows(2).enumerate() {
        if graph.distance(&w[0], &w[1]) != 1 {
            return Err(Error::InvalidQuery(format!(
                "segment points {i} and {} are not adjacent",
                i + 1
            )));
        }
    }
    if let (Some(first), Some(last)) = (segment.first(), segment.last()) {
        let d = graph.distance(first, last);
        if d + 1 != segment.len() {
            return Err(Error::InvalidQuery(format!(
                "segment of length {} joins points at distance {d}; not geodesic",
                segment.len() - 1
            )));
        }
    }
    Ok(())
}

/// Elements of word length at most `radius`.
fn small_ball(graph: &PresentationGraph, radius: u32) -> Vec<NormalForm> {
    let mut seen: HashSet<NormalForm> = HashSet::from([NormalForm::identity()]);
    let mut frontier = vec![NormalForm::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in graph.generators() {
                if let Some(h) = graph.extend(g, s) {
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<NormalForm> = seen.into_iter().collect();
    out.sort();
    out
}

/// Labels each point of a geodesic segment `(ε, R)`-deep or transition.
///
/// A point at distance more than `R` from both endpoints is deep in `gP` when
/// every segment point within `R` of it lies within `ε` of `gP`. Only cosets
/// within `ε` of the point itself can qualify, so those are the candidates.
pub fn classify_transitions(
    graph: &PresentationGraph,
    segment: &[NormalForm],
    p: &PeripheralStructure,
    epsilon: u32,
    r: u32,
) -> Result<TransitionAnnotation> {
    if r < 1 {
        return Err(Error::InvalidParameter("R must be ≥ 1".into()));
    }
    check_geodesic(graph, segment)?;
    let offsets = small_ball(graph, epsilon);
    let n = segment.len();
    let reach = r as usize;
    let mut points = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for (pos, x) in segment.iter().enumerate() {
        let interior = pos > reach && n - 1 - pos > reach;
        let mut deep: Vec<PeripheralCoset> = Vec::new();
        if interior {
            let window = &segment[pos - reach..=pos + reach];
            let mut candidates: Vec<PeripheralCoset> = offsets
                .iter()
                .flat_map(|w| {
                    let g = graph.mul(x, w);
                    (0..p.len()).map(move |i| (g.clone(), i))
                })
                .map(|(g, i)| PeripheralCoset::of(graph, &g, p, i))
                .collect();
            candidates.sort();
            candidates.dedup();
            deep = candidates
                .into_iter()
                .filter(|c| {
                    let t = &p.subgroups[c.subgroup_index];
                    window
                        .iter()
                        .all(|y| graph.distance_to_coset(y, &c.min_rep, t) <= epsilon as usize)
                })
                .collect();
        }
        let mut it = deep.into_iter();
        let status = match it.next() {
            Some(c) => PointStatus::Deep(c),
            None => PointStatus::Transition,
        };
        let also_deep: Vec<PeripheralCoset> = it.collect();
        if !also_deep.is_empty() {
            warnings.push(format!(
                "position {pos}: deep in {} cosets",
                also_deep.len() + 1
            ));
        }
        points.push(PointClass {
            position: pos,
            status,
            also_deep,
        });
    }
    Ok(TransitionAnnotation {
        epsilon,
        r,
        points,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenetrationReport {
    /// For each group vertex of `q`, `min_{w ∈ p} d_S(w, v)`.
    pub min_distances: Vec<u32>,
    pub max_min_distance: u32,
    pub path_length: usize,
    pub log2_path_length: f64,
    /// `max_min_distance / log₂|p|`, when `|p| ≥ 2`.
    pub k_estimate: Option<f64>,
}

/// Measures how far a coned geodesic `q` strays from a Cayley path `p` with
/// the same endpoints, against `log₂|p|`.
pub fn penetration_check(
    cb: &ConedOffBall,
    p: &[NormalForm],
    q: &[ConedVertex],
) -> Result<PenetrationReport> {
    let graph = cb.base().graph();
    if p.is_empty() || q.is_empty() {
        return Err(Error::InvalidQuery("paths must be non-empty".into()));
    }
    for (i, w) in p.windows(2).enumerate() {
        if graph.distance(&w[0], &w[1]) != 1 {
            return Err(Error::InvalidQuery(format!("p is not a path at step {i}")));
        }
    }
    let (q0, q1) = (q[0], q[q.len() - 1]);
    let ends = [cb.group_vertex(&p[0])?, cb.group_vertex(&p[p.len() - 1])?];
    if ends != [q0, q1] {
        return Err(Error::InvalidQuery("p and q must share endpoints".into()));
    }
    let mut length = HalfLength(0);
    for w in q.windows(2) {
        let step = cb
            .edge_length(w[0], w[1])
            .ok_or_else(|| Error::InvalidQuery("q is not a path in the coned ball".into()))?;
        length = HalfLength(length.0 + step.0);
    }
    if length != cb.coned_distance(q0, q1)? {
        return Err(Error::InvalidQuery("q is not geodesic in the coned ball".into()));
    }
    let min_distances: Vec<u32> = q
        .iter()
        .filter_map(|&v| match v {
            ConedVertex::Group(x) => Some(cb.base().element(x)),
            ConedVertex::Cone(_) => None,
        })
        .map(|v| {
            p.iter()
                .map(|w| graph.distance(w, v) as u32)
                .min()
                .unwrap()
        })
        .collect();
    let max_min_distance = min_distances.iter().copied().max().unwrap_or(0);
    let path_length = p.len() - 1;
    let log2_path_length = if path_length == 0 { 0.0 } else { (path_length as f64).log2() };
    let k_estimate = (path_length >= 2).then(|| max_min_distance as f64 / log2_path_length);
    Ok(PenetrationReport {
        min_distances,
        max_min_distance,
        path_length,
        log2_path_length,
        k_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{build_ball, Budget, GeodesicSpec};
    use crate::coxeter::{build_family, FamilyKind};
    use std::sync::Arc;

    fn omega(d: u32) -> Arc<PresentationGraph> {
        Arc::new(build_family(FamilyKind::Omega, d).unwrap())
    }

    fn ball(g: &Arc<PresentationGraph>, r: u32) -> CayleyBall {
        build_ball(g.clone(), NormalForm::identity(), r, Budget::unlimited()).unwrap()
    }

    #[test]
    fn omega1_radius1_cosets() {
        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        let cosets = enumerate_cosets(&ball(&g, 1), &p);
        // P, c1·P and c2·P: both c1 and c2 lie outside Γ_1.
        assert_eq!(cosets.len(), 3);
        assert!(cosets[0].coset.min_rep.is_identity());
        assert_eq!(cosets[0].members, 5);
        assert_eq!(g.format(&cosets[1].coset.min_rep), "c1");
        assert_eq!(g.format(&cosets[2].coset.min_rep), "c2");
        assert_eq!(cosets[1].members, 1);
        let t = &p.subgroups[0];
        let outside: Vec<String> = ball(&g, 1)
            .elements()
            .filter(|x| !g.subgroup_membership(x, t))
            .map(|x| g.format(x))
            .collect();
        assert_eq!(outside, ["c1", "c2"]);

        let zero = enumerate_cosets(&ball(&g, 0), &p);
        assert_eq!(zero.len(), 1);
    }

    #[test]
    fn omega2_coset_partition_matches_brute_force() {
        let g = omega(2);
        let p = PeripheralStructure::omega(&g, 2).unwrap();
        let b = ball(&g, 2);
        let cosets = enumerate_cosets(&b, &p);
        // Brute force: x, y share a coset iff x⁻¹y ∈ P.
        let t = &p.subgroups[0];
        let elems: Vec<&NormalForm> = b.elements().collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, x) in elems.iter().enumerate() {
            match classes
                .iter_mut()
                .find(|c| g.subgroup_membership(&g.left_divide(elems[c[0]], x), t))
            {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        assert_eq!(cosets.len(), classes.len());
        assert_eq!(cosets.iter().map(|c| c.members).sum::<usize>(), b.len());
    }

    #[test]
    fn coned_ball_shapes() {
        let g2 = Arc::new(build_family(FamilyKind::Gamma, 2).unwrap());
        let all = PeripheralStructure::new(vec![GeneratorSet::all(&g2)]);
        let cb = build_coned_off(ball(&g2, 2), &all);
        assert_eq!(cb.num_cones(), 1);
        assert_eq!(cb.members(0).len(), cb.base().len());

        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        assert_eq!(build_coned_off(ball(&g, 1), &p).num_cones(), 3);

        let none = build_coned_off(ball(&g, 2), &PeripheralStructure::default());
        assert_eq!(none.num_cones(), 0);
        let e = none.group_vertex(&NormalForm::identity()).unwrap();
        let far = none.group_vertex(&g.parse_element("c1 b0").unwrap()).unwrap();
        assert_eq!(none.coned_distance(e, far).unwrap(), HalfLength::whole(2));
    }

    #[test]
    fn coned_distances() {
        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        let cb = build_coned_off(ball(&g, 3), &p);
        let v = |w: &str| cb.group_vertex(&g.parse_element(w).unwrap()).unwrap();
        let e = v("ε");
        assert_eq!(cb.coned_distance(e, e).unwrap(), HalfLength(0));
        assert_eq!(cb.coned_distance(e, v("c1")).unwrap(), HalfLength::whole(1));
        // Same coset, Cayley distance 3, through the cone: 1.
        assert_eq!(cb.coned_distance(e, v("a0 b0 a0")).unwrap(), HalfLength::whole(1));
        assert_eq!(cb.coned_distance(e, v("a0")).unwrap(), HalfLength::whole(1));
        let cone = ConedVertex::Cone(0);
        assert_eq!(cb.coned_distance(e, cone).unwrap(), HalfLength(1));
        assert_eq!(HalfLength(1).to_string(), "1/2");
        assert_eq!(HalfLength(3).to_string(), "3/2");
        assert_eq!(HalfLength(4).to_string(), "2");
        assert!(cb.coned_distance(e, ConedVertex::Group(1 << 30)).is_err());
    }

    #[test]
    fn coned_json_export() {
        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        let cb = build_coned_off(ball(&g, 1), &p);
        let json = cb.to_json();
        assert_eq!(json["cone_vertices"].as_array().unwrap().len(), 3);
        assert_eq!(json["group_vertices"].as_array().unwrap().len(), 7);
        // 6 group edges plus one cone edge per (vertex, subgroup).
        assert_eq!(json["edges"].as_array().unwrap().len(), 6 + 7);
    }

    #[test]
    fn transitions_inside_peripheral() {
        let g = omega(2);
        let p = PeripheralStructure::omega(&g, 2).unwrap();
        let spec = GeodesicSpec::new(&g, g.parse_word("a2 b2").unwrap(), NormalForm::identity())
            .unwrap();
        let r = 2;
        let seg = spec.segment(&g, 0, 2 * r as i64 + 2);
        assert_eq!(seg.len(), 2 * r as usize + 3);
        let ann = classify_transitions(&g, &seg, &p, 1, r).unwrap();
        match &ann.points[r as usize + 1].status {
            PointStatus::Deep(c) => assert!(c.min_rep.is_identity()),
            other => panic!("{other:?}"),
        }
        for pos in [0, 1, 2, 4, 5, 6] {
            assert_eq!(ann.points[pos].status, PointStatus::Transition);
        }

        let short = spec.segment(&g, 0, 2 * r as i64);
        let ann = classify_transitions(&g, &short, &p, 1, r).unwrap();
        assert_eq!(ann.deep_count(), 0);
        assert_eq!(ann.points.len(), short.len());
    }

    #[test]
    fn transitions_reject_non_geodesic() {
        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        let seg = vec![
            NormalForm::identity(),
            g.parse_element("a0").unwrap(),
            NormalForm::identity(),
        ];
        assert!(matches!(
            classify_transitions(&g, &seg, &p, 1, 2),
            Err(Error::InvalidQuery(_))
        ));
    }

    /// Golden classification of `(c1 b0)^4` in `Ω_1` at `(ε, R) = (1, 2)`.
    #[test]
    fn transitions_c1b0_golden() {
        let g = omega(1);
        let p = PeripheralStructure::omega(&g, 1).unwrap();
        let spec = GeodesicSpec::new(&g, g.parse_word("c1 b0").unwrap(), NormalForm::identity())
            .unwrap();
        let seg = spec.segment(&g, 0, 8);
        let ann = classify_transitions(&g, &seg, &p, 1, 2).unwrap();
        assert_eq!(ann.deep_count(), 0);
        assert!(ann.warnings.is_empty());

        // Hand check at position 4 (= c1 b0 c1 b0): the window is positions
        // 2..=6. The coset through positions 3 and 4 misses position 6 by 2.
        let t = &p.subgroups[0];
        let x3 = &seg[3];
        assert_eq!(g.distance_to_coset(&seg[4], x3, t), 0);
        assert_eq!(g.distance_to_coset(&seg[2], x3, t), 1);
        assert_eq!(g.distance_to_coset(&seg[6], x3, t), 2);
        // Position 3 (= c1 b0 c1): window 1..=5; the coset c1·P through 1
        // and 2 is 3 away from position 5 (c1 b0 c1 b0 is its minimal offset).
        assert_eq!(g.distance_to_coset(&seg[5], &seg[1], t), 3);
        assert_eq!(g.distance_to_coset(&seg[1], &seg[3], t), 2);
    }

    #[test]
    fn penetration_basics() {
        let g = omega(2);
        let p = PeripheralStructure::omega(&g, 2).unwrap();
        let cb = build_coned_off(ball(&g, 4), &p);
        let e = NormalForm::identity();
        let c1 = g.parse_element("c1").unwrap();
        let q = cb
            .coned_geodesic(cb.group_vertex(&e).unwrap(), cb.group_vertex(&c1).unwrap())
            .unwrap();
        assert_eq!(q.len(), 2);
        let same = vec![e.clone(), c1.clone()];
        assert_eq!(penetration_check(&cb, &same, &q).unwrap().max_min_distance, 0);

        // b1 commutes with c1: ε → b1 → c1 b1 → c1.
        let detour: Vec<NormalForm> = ["ε", "b1", "c1 b1", "c1"]
            .iter()
            .map(|w| g.parse_element(w).unwrap())
            .collect();
        let rep = penetration_check(&cb, &detour, &q).unwrap();
        assert_eq!(rep.path_length, 3);
        assert_eq!(rep.k_estimate, Some(0.0));

        let far = g.parse_element("c1 b0").unwrap();
        assert!(penetration_check(&cb, &[e.clone(), far], &q).is_err());
    }

    #[test]
    fn penetration_single_coset_bounded_by_diameter() {
        let g = Arc::new(build_family(FamilyKind::Gamma, 1).unwrap());
        let all = PeripheralStructure::new(vec![GeneratorSet::all(&g)]);
        let radius = 3;
        let cb = build_coned_off(ball(&g, radius), &all);
        let u = g.parse_element("a0 b0 a0").unwrap();
        let v = g.parse_element("a1 b1 a1").unwrap();
        let q = cb
            .coned_geodesic(cb.group_vertex(&u).unwrap(), cb.group_vertex(&v).unwrap())
            .unwrap();
        // Through the single cone vertex.
        assert_eq!(q.len(), 3);
        let ball_path = cb.base().constrained_path(
            cb.base().vertex_id(&u).unwrap(),
            cb.base().vertex_id(&v).unwrap(),
            |_| true,
        );
        let p: Vec<NormalForm> = ball_path
            .unwrap()
            .into_iter()
            .map(|x| cb.base().element(x).clone())
            .collect();
        let rep = penetration_check(&cb, &p, &q).unwrap();
        assert!(rep.max_min_distance <= 2 * radius);
    }
}
