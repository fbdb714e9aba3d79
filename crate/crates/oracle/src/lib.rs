//! Brute-force reference computations for right-angled Coxeter groups.
//!
//! Nothing here shares code with `racgdiv-core`. Group elements are modelled
//! by the Tits geometric representation, which is faithful: generator `s`
//! acts on `ℤ^n` by `v ↦ v − 2B(e_s, v)e_s` where `B(e_s, e_s) = 1`,
//! `B(e_s, e_t) = 0` for adjacent generators and `−1` otherwise. Two words
//! are the same element iff their matrices agree, so a breadth-first search
//! over matrices enumerates the Cayley graph from the relations alone.

use std::collections::{HashMap, HashSet, VecDeque};

/// Integer matrix of a group element, row-major.
pub type Matrix = Vec<i64>;

/// Commutation data of an RACG given only by vertex count and edge list.
#[derive(Debug, Clone)]
pub struct Relations {
    pub n: usize,
    adj: Vec<bool>,
}

impl Relations {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        Self { n, adj }
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a * self.n + b]
    }

    fn bilinear(&self, s: usize, t: usize) -> i64 {
        if s == t {
            1
        } else if self.commutes(s, t) {
            0
        } else {
            -1
        }
    }

    /// Matrix of the reflection `σ_s`.
    pub fn reflection(&self, s: usize) -> Matrix {
        let n = self.n;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        // σ_s(e_t) = e_t − 2B(e_s, e_t) e_s: column t gains −2B(s,t) in row s.
        for t in 0..n {
            m[s * n + t] -= 2 * self.bilinear(s, t);
        }
        m
    }

    pub fn identity(&self) -> Matrix {
        let n = self.n;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        m
    }

    /// `m · σ_s` (right multiplication by a generator).
    pub fn right_mul(&self, m: &Matrix, s: usize) -> Matrix {
        let n = self.n;
        let r = self.reflection(s);
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = m[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = r[k * n + j];
                    if b != 0 {
                        out[i * n + j] = out[i * n + j]
                            .checked_add(a.checked_mul(b).expect("matrix entry overflow"))
                            .expect("matrix entry overflow");
                    }
                }
            }
        }
        out
    }

    pub fn evaluate(&self, word: &[usize]) -> Matrix {
        word.iter()
            .fold(self.identity(), |m, &s| self.right_mul(&m, s))
    }
}

/// Cayley ball enumerated over matrices.
#[derive(Debug, Clone)]
pub struct MatrixBall {
    pub radius: usize,
    pub elements: Vec<Matrix>,
    pub index: HashMap<Matrix, usize>,
    pub dist: Vec<usize>,
    /// `neighbors[v][s]`, when the neighbour lies in the ball.
    pub neighbors: Vec<Vec<Option<usize>>>,
}

impl MatrixBall {
    pub fn build(rel: &Relations, radius: usize) -> Self {
        let mut elements = vec![rel.identity()];
        let mut index = HashMap::new();
        index.insert(rel.identity(), 0);
        let mut dist = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            if dist[v] == radius {
                continue;
            }
            for s in 0..rel.n {
                let m = rel.right_mul(&elements[v], s);
                if !index.contains_key(&m) {
                    index.insert(m.clone(), elements.len());
                    elements.push(m);
                    dist.push(dist[v] + 1);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let neighbors = elements
            .iter()
            .map(|m| {
                (0..rel.n)
                    .map(|s| index.get(&rel.right_mul(m, s)).copied())
                    .collect()
            })
            .collect();
        Self {
            radius,
            elements,
            index,
            dist,
            neighbors,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.dist {
            out[d] += 1;
        }
        out
    }

    pub fn locate(&self, rel: &Relations, word: &[usize]) -> Option<usize> {
        self.index.get(&rel.evaluate(word)).copied()
    }

    /// BFS distances from `src` inside the ball along vertices accepted by `allowed`.
    pub fn bfs(&self, src: usize, allowed: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
        let mut d = vec![None; self.len()];
        if !allowed(src) {
            return d;
        }
        d[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let dv = d[v].unwrap();
            for &w in self.neighbors[v].iter().flatten() {
                if d[w].is_none() && allowed(w) {
                    d[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        d
    }

    /// Shortest path from `u` to `v` using only vertices whose BFS distance
    /// from `center` (computed inside this ball) is at least `r`.
    pub fn avoidant(&self, u: usize, v: usize, center: usize, r: usize) -> Option<usize> {
        let from_center = self.bfs(center, |_| true);
        let ok = |x: usize| from_center[x].is_some_and(|d| d >= r);
        self.bfs(u, ok)[v]
    }
}

/// All words over `n` letters of length exactly `len`.
pub fn all_words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    out
}

/// ShortLex normal form by exhaustive rewriting: closes `word` under
/// commuting swaps and deletion of adjacent equal letters, then picks the
/// shortest, lexicographically least word reached. Exponential; use on
/// short words only.
pub fn rewriting_closure_shortlex(rel: &Relations, word: &[usize]) -> Vec<usize> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::from([word.to_vec()]);
    seen.insert(word.to_vec());
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            let next = if w[i] == w[i + 1] {
                let mut x = w.clone();
                x.drain(i..i + 2);
                x
            } else if rel.commutes(w[i], w[i + 1]) {
                let mut x = w.clone();
                x.swap(i, i + 1);
                x
            } else {
                continue;
            };
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .unwrap()
}

/// The square grid `ℤ²` with the ℓ¹ metric: the Cayley graph of `D∞ × D∞`.
pub mod grid {
    use std::collections::{HashMap, VecDeque};

    pub type Point = (i64, i64);

    pub fn l1(p: Point, q: Point) -> i64 {
        (p.0 - q.0).abs() + (p.1 - q.1).abs()
    }

    /// Shortest path length from `u` to `v` through points at ℓ¹ distance
    /// `≥ r` from `center` and `≤ bound` from `origin`.
    pub fn avoidant(
        u: Point,
        v: Point,
        center: Point,
        r: i64,
        origin: Point,
        bound: i64,
    ) -> Option<i64> {
        let ok = |p: Point| l1(p, center) >= r && l1(p, origin) <= bound;
        if !ok(u) || !ok(v) {
            return None;
        }
        let mut d = HashMap::from([(u, 0i64)]);
        let mut q = VecDeque::from([u]);
        while let Some(p) = q.pop_front() {
            if p == v {
                return Some(d[&p]);
            }
            let dp = d[&p];
            for step in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let n = (p.0 + step.0, p.1 + step.1);
                if ok(n) && !d.contains_key(&n) {
                    d.insert(n, dp + 1);
                    q.push_back(n);
                }
            }
        }
        None
    }

    pub fn sphere(r: i64) -> Vec<Point> {
        let mut out = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                if x.abs() + y.abs() == r {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Max over pairs of the r-sphere of the avoidant distance at radius `r`.
    pub fn gersten_sup(r: i64, bound: i64) -> i64 {
        let s = sphere(r);
        let mut best = 0;
        for (i, &p) in s.iter().enumerate() {
            for &q in &s[i..] {
                if let Some(d) = avoidant(p, q, (0, 0), r, (0, 0), bound) {
                    best = best.max(d);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflections_are_involutions() {
        let rel = Relations::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        for s in 0..4 {
            assert_eq!(rel.evaluate(&[s, s]), rel.identity());
        }
        assert_eq!(rel.evaluate(&[0, 1]), rel.evaluate(&[1, 0]));
        assert_ne!(rel.evaluate(&[0, 2]), rel.evaluate(&[2, 0]));
    }

    #[test]
    fn square_grid_spheres() {
        let rel = Relations::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let ball = MatrixBall::build(&rel, 6);
        assert_eq!(ball.sphere_sizes(), vec![1, 4, 8, 12, 16, 20, 24]);
    }

    #[test]
    fn grid_detour() {
        assert_eq!(grid::avoidant((-1, 0), (1, 0), (0, 0), 1, (0, 0), 4), Some(4));
        assert_eq!(grid::gersten_sup(2, 4), 8);
    }

    #[test]
    fn closure_normal_form() {
        let rel = Relations::new(3, &[(0, 2)]);
        assert_eq!(rewriting_closure_shortlex(&rel, &[2, 1, 0]), vec![2, 1, 0]);
        assert_eq!(rewriting_closure_shortlex(&rel, &[2, 0, 2]), vec![0]);
    }
}
