//! Right-angled Coxeter groups: presentations, the word problem, and special
//! subgroups.
//!
//! A [`PresentationGraph`] fixes a total order on the generators; every group
//! element is carried around as its ShortLex [`NormalForm`], the
//! lexicographically least reduced word for that element. Normal forms are
//! maintained incrementally: right-multiplying a normal form by one generator
//! either deletes a letter or inserts one, and both steps keep the word in
//! ShortLex form.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator index into a [`PresentationGraph`]. Order of indices is the
/// ShortLex order.
pub type Letter = u16;

const MAX_GENERATORS: usize = Letter::MAX as usize;

/// Finite simplicial graph defining a right-angled Coxeter group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationGraph {
    names: Vec<String>,
    index: HashMap<String, Letter>,
    commute: Vec<bool>,
    edges: Vec<(Letter, Letter)>,
}

#[derive(Deserialize)]
struct GraphFile {
    generators: Vec<String>,
    edges: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct GraphFileOut<'a> {
    generators: &'a [String],
    edges: Vec<[&'a str; 2]>,
}

impl PresentationGraph {
    /// Builds a presentation; generator order is declaration order.
    pub fn new<S: AsRef<str>>(generators: &[S], edges: &[(S, S)]) -> Result<Self> {
        let edges: Vec<Vec<String>> = edges
            .iter()
            .map(|(a, b)| vec![a.as_ref().to_string(), b.as_ref().to_string()])
            .collect();
        let generators = generators.iter().map(|g| g.as_ref().to_string()).collect();
        Self::from_parts(generators, &edges)
    }

    fn from_parts(names: Vec<String>, edges: &[Vec<String>]) -> Result<Self> {
        if names.len() > MAX_GENERATORS {
            return Err(Error::InvalidGraph(format!(
                "generators: {} generators exceeds the supported maximum {MAX_GENERATORS}",
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::InvalidGraph(format!(
                    "generators[{i}]: identifier {name:?} must be non-empty without whitespace or commas"
                )));
            }
            if index.insert(name.clone(), i as Letter).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "generators[{i}]: duplicate generator {name:?}"
                )));
            }
        }
        let n = names.len();
        let mut commute = vec![false; n * n];
        let mut out_edges = Vec::with_capacity(edges.len());
        for (i, edge) in edges.iter().enumerate() {
            let [a, b] = edge.as_slice() else {
                return Err(Error::InvalidGraph(format!(
                    "edges[{i}]: expected exactly 2 endpoints, got {}",
                    edge.len()
                )));
            };
            let lookup = |name: &String| {
                index.get(name).copied().ok_or_else(|| {
                    Error::InvalidGraph(format!(
                        "edges[{i}]: [{a:?}, {b:?}] names undeclared generator {name:?}"
                    ))
                })
            };
            let (x, y) = (lookup(a)?, lookup(b)?);
            if x == y {
                return Err(Error::InvalidGraph(format!(
                    "edges[{i}]: [{a:?}, {b:?}] is a self-loop"
                )));
            }
            let slot = x as usize * n + y as usize;
            if commute[slot] {
                return Err(Error::InvalidGraph(format!(
                    "edges[{i}]: [{a:?}, {b:?}] duplicates an earlier edge"
                )));
            }
            commute[slot] = true;
            commute[y as usize * n + x as usize] = true;
            out_edges.push((x.min(y), x.max(y)));
        }
        out_edges.sort_unstable();
        Ok(Self {
            names,
            index,
            commute,
            edges: out_edges,
        })
    }

    /// Parses the `{"generators": [...], "edges": [[u, v], ...]}` format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidGraph(format!("malformed graph JSON: {e}")))?;
        Self::from_parts(file.generators, &file.edges)
    }

    pub fn to_json(&self) -> String {
        let out = GraphFileOut {
            generators: &self.names,
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.name(a), self.name(b)])
                .collect(),
        };
        serde_json::to_string(&out).expect("graph serializes")
    }

    pub fn num_generators(&self) -> usize {
        self.names.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| i as Letter)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: Letter) -> &str {
        &self.names[s as usize]
    }

    /// Unordered edges as `(smaller, larger)` index pairs, sorted.
    pub fn edges(&self) -> &[(Letter, Letter)] {
        &self.edges
    }

    /// Looks up a generator by name. Built-in names may also be written with
    /// an underscore (`a_0` for `a0`).
    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied().or_else(|| {
            name.contains('_')
                .then(|| self.index.get(&name.replace('_', "")).copied())
                .flatten()
        })
    }

    /// True iff `s` and `t` are distinct and joined by an edge.
    #[inline]
    pub fn commutes(&self, s: Letter, t: Letter) -> bool {
        self.commute[s as usize * self.names.len() + t as usize]
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let letters = text
            .split(|c: char| c.is_whitespace() || c == ',' || c == '*' || c == '.')
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                self.letter(tok)
                    .ok_or_else(|| Error::InvalidWord(format!("unknown generator {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word(letters))
    }

    /// Parses a comma- or space-separated generator subset.
    pub fn parse_generator_set(&self, text: &str) -> Result<GeneratorSet> {
        let word = self.parse_word(text).map_err(|e| match e {
            Error::InvalidWord(msg) => Error::InvalidParameter(msg),
            other => other,
        })?;
        GeneratorSet::new(self, &word.0)
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        match word.0.iter().find(|&&s| s as usize >= self.names.len()) {
            Some(s) => Err(Error::InvalidWord(format!(
                "letter index {s} is not a generator (graph has {})",
                self.names.len()
            ))),
            None => Ok(()),
        }
    }

    /// Position of the letter that `s` would cancel when appended to the
    /// reduced word `w`, if any.
    #[inline]
    fn cancellation_site(&self, w: &[Letter], s: Letter) -> std::result::Result<usize, usize> {
        for i in (0..w.len()).rev() {
            let x = w[i];
            if x == s {
                return Ok(i);
            }
            if !self.commutes(x, s) {
                return Err(i + 1);
            }
        }
        Err(0)
    }

    /// True iff `g·s` is shorter than `g`.
    pub fn is_descent(&self, g: &NormalForm, s: Letter) -> bool {
        self.cancellation_site(&g.0, s).is_ok()
    }

    /// Normal form of `g·s`.
    pub fn mul_gen(&self, g: &NormalForm, s: Letter) -> NormalForm {
        let mut out = g.0.clone();
        self.mul_gen_in_place(&mut out, s);
        NormalForm(out)
    }

    /// Normal form of `g·s` when `s` is not a descent of `g`; `None` when it is.
    pub fn extend(&self, g: &NormalForm, s: Letter) -> Option<NormalForm> {
        let start = self.cancellation_site(&g.0, s).err()?;
        let mut out = Vec::with_capacity(g.0.len() + 1);
        out.extend_from_slice(&g.0);
        let at = insertion_point(&out, start, s);
        out.insert(at, s);
        Some(NormalForm(out))
    }

    fn mul_gen_in_place(&self, w: &mut Vec<Letter>, s: Letter) {
        match self.cancellation_site(w, s) {
            // Removing a letter that nothing later depends on keeps the
            // greedy lexicographic order of the rest intact.
            Ok(i) => {
                w.remove(i);
            }
            // `s` can only slide left through the commuting suffix; it lands
            // in front of the first letter there that is larger than it.
            Err(start) => {
                let at = insertion_point(w, start, s);
                w.insert(at, s);
            }
        }
    }

    /// ShortLex normal form of the element spelled by `word`.
    pub fn normal_form(&self, word: &Word) -> Result<NormalForm> {
        self.check_word(word)?;
        Ok(self.normal_form_of(&word.0))
    }

    pub(crate) fn normal_form_of(&self, letters: &[Letter]) -> NormalForm {
        let mut w = Vec::with_capacity(letters.len());
        for &s in letters {
            self.mul_gen_in_place(&mut w, s);
        }
        NormalForm(w)
    }

    /// True iff `word` is a geodesic spelling, i.e. has no deletable pair.
    pub fn is_reduced(&self, word: &Word) -> Result<bool> {
        self.check_word(word)?;
        let mut w = Vec::with_capacity(word.0.len());
        for &s in &word.0 {
            if self.cancellation_site(&w, s).is_ok() {
                return Ok(false);
            }
            w.push(s);
        }
        Ok(true)
    }

    /// Normal form of `g·h`.
    pub fn mul(&self, g: &NormalForm, h: &NormalForm) -> NormalForm {
        let mut w = g.0.clone();
        for &s in &h.0 {
            self.mul_gen_in_place(&mut w, s);
        }
        NormalForm(w)
    }

    /// Generators are involutions, so the inverse is the reversed word.
    pub fn inverse(&self, g: &NormalForm) -> NormalForm {
        let rev: Vec<Letter> = g.0.iter().rev().copied().collect();
        self.normal_form_of(&rev)
    }

    /// Normal form of `g⁻¹·h`.
    pub fn left_divide(&self, g: &NormalForm, h: &NormalForm) -> NormalForm {
        let mut w = Vec::with_capacity(g.len() + h.len());
        for &s in g.0.iter().rev().chain(h.0.iter()) {
            self.mul_gen_in_place(&mut w, s);
        }
        NormalForm(w)
    }

    /// Word metric `d_S(g, h) = |g⁻¹h|`.
    pub fn distance(&self, g: &NormalForm, h: &NormalForm) -> usize {
        self.left_divide(g, h).len()
    }

    pub fn format(&self, g: &NormalForm) -> String {
        self.format_letters(&g.0)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.format_letters(&w.0)
    }

    fn format_letters(&self, letters: &[Letter]) -> String {
        if letters.is_empty() {
            return IDENTITY.to_string();
        }
        letters
            .iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses either a word or the identity symbol and returns its normal form.
    pub fn parse_element(&self, text: &str) -> Result<NormalForm> {
        if text.trim() == IDENTITY {
            return Ok(NormalForm::identity());
        }
        self.normal_form(&self.parse_word(text)?)
    }

    /// The element `g` restricted to a generator subset: `true` iff `g`
    /// lies in the special subgroup `H_T`.
    pub fn subgroup_membership(&self, g: &NormalForm, t: &GeneratorSet) -> bool {
        g.0.iter().all(|&s| t.contains(s))
    }

    /// Minimal-length element of the left coset `g·H_T`, by greedy descent.
    pub fn coset_min_rep(&self, g: &NormalForm, t: &GeneratorSet) -> NormalForm {
        let mut w = g.0.clone();
        'descend: loop {
            for &s in t.letters() {
                if let Ok(i) = self.cancellation_site(&w, s) {
                    w.remove(i);
                    continue 'descend;
                }
            }
            return NormalForm(w);
        }
    }

    /// `d_S(x, gH_T)`: length of the minimal representative of `x⁻¹gH_T`.
    pub fn distance_to_coset(&self, x: &NormalForm, g: &NormalForm, t: &GeneratorSet) -> usize {
        self.coset_min_rep(&self.left_divide(x, g), t).len()
    }
}

/// Printed form of the identity element.
pub const IDENTITY: &str = "ε";

#[inline]
fn insertion_point(w: &[Letter], start: usize, s: Letter) -> usize {
    w[start..]
        .iter()
        .position(|&x| x > s)
        .map_or(w.len(), |p| start + p)
}

/// A finite sequence of generators, not necessarily reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }
}

/// ShortLex-reduced word; equal normal forms are equal group elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalForm(Vec<Letter>);

impl NormalForm {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }
}

/// ShortLex order: shorter first, then lexicographic in generator order.
impl Ord for NormalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NormalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Subset `T` of the generators, defining the special subgroup `H_T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    letters: Vec<Letter>,
    mask: Vec<bool>,
}

impl GeneratorSet {
    pub fn new(graph: &PresentationGraph, letters: &[Letter]) -> Result<Self> {
        let n = graph.num_generators();
        let mut mask = vec![false; n];
        for &s in letters {
            let slot = mask.get_mut(s as usize).ok_or_else(|| {
                Error::InvalidParameter(format!("generator index {s} not in graph of {n}"))
            })?;
            *slot = true;
        }
        let letters = (0..n as Letter).filter(|&s| mask[s as usize]).collect();
        Ok(Self { letters, mask })
    }

    pub fn from_names<S: AsRef<str>>(graph: &PresentationGraph, names: &[S]) -> Result<Self> {
        let letters = names
            .iter()
            .map(|n| {
                graph.letter(n.as_ref()).ok_or_else(|| {
                    Error::InvalidParameter(format!("unknown generator {:?}", n.as_ref()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, &letters)
    }

    pub fn all(graph: &PresentationGraph) -> Self {
        let letters: Vec<Letter> = graph.generators().collect();
        Self::new(graph, &letters).expect("all generators are valid")
    }

    #[inline]
    pub fn contains(&self, s: Letter) -> bool {
        self.mask.get(s as usize).copied().unwrap_or(false)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// The built-in graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Gamma,
    Omega,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Gamma => "gamma",
            FamilyKind::Omega => "omega",
        }
    }
}

/// Which group a computation runs over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupFamily {
    Gamma { d: u32 },
    Omega { d: u32 },
    Custom { name: String },
}

impl GroupFamily {
    pub fn build(&self) -> Result<Option<PresentationGraph>> {
        match *self {
            GroupFamily::Gamma { d } => build_family(FamilyKind::Gamma, d).map(Some),
            GroupFamily::Omega { d } => build_family(FamilyKind::Omega, d).map(Some),
            GroupFamily::Custom { .. } => Ok(None),
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::Gamma { d } => write!(f, "gamma:{d}"),
            GroupFamily::Omega { d } => write!(f, "omega:{d}"),
            GroupFamily::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

impl std::str::FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, d) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("family {s:?}: expected kind:d")))?;
        let d: u32 = d
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("family {s:?}: d is not an integer")))?;
        if d < 1 {
            return Err(Error::InvalidParameter(format!("family {s:?}: d must be ≥ 1")));
        }
        match kind {
            "gamma" => Ok(GroupFamily::Gamma { d }),
            "omega" => Ok(GroupFamily::Omega { d }),
            _ => Err(Error::InvalidParameter(format!(
                "family {s:?}: kind must be gamma or omega"
            ))),
        }
    }
}

/// Names of the vertices of `Γ_d` in ShortLex order: `a0..ad, b0..bd`.
pub fn gamma_vertex_names(d: u32) -> Vec<String> {
    (0..=d)
        .map(|i| format!("a{i}"))
        .chain((0..=d).map(|i| format!("b{i}")))
        .collect()
}

/// Builds `Γ_d` or `Ω_d`.
///
/// `Γ_d` joins `a0` and `b0` to every `a_i` (`i ≥ 1`) and to `b1`, runs the
/// path `b1 – b2 – … – bd`, and joins `a_i` to `b_{i+1}`. `Ω_d` adds the path
/// `b1 – c1 – c2 – ad`.
pub fn build_family(kind: FamilyKind, d: u32) -> Result<PresentationGraph> {
    if d < 1 {
        return Err(Error::InvalidParameter(format!("d must be ≥ 1, got {d}")));
    }
    let a = |i: u32| format!("a{i}");
    let b = |i: u32| format!("b{i}");
    let mut names = gamma_vertex_names(d);
    let mut edges = Vec::with_capacity(4 * d as usize + 3);
    for i in 1..=d {
        edges.push((a(0), a(i)));
        edges.push((b(0), a(i)));
    }
    edges.push((a(0), b(1)));
    edges.push((b(0), b(1)));
    for i in 1..d {
        edges.push((b(i), b(i + 1)));
        edges.push((a(i), b(i + 1)));
    }
    if kind == FamilyKind::Omega {
        names.push("c1".into());
        names.push("c2".into());
        edges.push((b(1), "c1".into()));
        edges.push(("c1".into(), "c2".into()));
        edges.push(("c2".into(), a(d)));
    }
    PresentationGraph::new(&names, &edges)
}

/// Generator set of `Γ_d` inside `Ω_d` (or inside `Γ_d` itself).
pub fn gamma_subset(graph: &PresentationGraph, d: u32) -> Result<GeneratorSet> {
    GeneratorSet::from_names(graph, &gamma_vertex_names(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma(d: u32) -> PresentationGraph {
        build_family(FamilyKind::Gamma, d).unwrap()
    }

    fn omega(d: u32) -> PresentationGraph {
        build_family(FamilyKind::Omega, d).unwrap()
    }

    fn nf(g: &PresentationGraph, w: &str) -> String {
        g.format(&g.normal_form(&g.parse_word(w).unwrap()).unwrap())
    }

    fn has_edge(g: &PresentationGraph, a: &str, b: &str) -> bool {
        g.commutes(g.letter(a).unwrap(), g.letter(b).unwrap())
    }

    #[test]
    fn family_sizes() {
        let g1 = gamma(1);
        assert_eq!((g1.num_generators(), g1.edges().len()), (4, 4));
        // a0 – b1 – b0 – a1 – a0
        for (x, y) in [("a0", "b1"), ("b1", "b0"), ("b0", "a1"), ("a1", "a0")] {
            assert!(has_edge(&g1, x, y));
        }
        assert!(!has_edge(&g1, "a0", "b0"));
        assert!(!has_edge(&g1, "a1", "b1"));

        let o1 = omega(1);
        assert_eq!((o1.num_generators(), o1.edges().len()), (6, 7));
        for (x, y) in [("b1", "c1"), ("c1", "c2"), ("c2", "a1")] {
            assert!(has_edge(&o1, x, y));
        }

        for d in 1..=7 {
            assert_eq!(gamma(d).edges().len(), 4 * d as usize);
            assert_eq!(gamma(d).num_generators(), 2 * d as usize + 2);
            assert_eq!(omega(d).edges().len(), 4 * d as usize + 3);
            assert_eq!(omega(d).num_generators(), 2 * d as usize + 4);
        }
        assert_eq!(gamma(3).num_generators(), 8);
        assert_eq!(gamma(3).edges().len(), 12);
    }

    #[test]
    fn gamma_three_matches_figure_panel() {
        let g = gamma(3);
        let expected = [
            ("a0", "a1"),
            ("a0", "a2"),
            ("a0", "a3"),
            ("a0", "b1"),
            ("b0", "a1"),
            ("b0", "a2"),
            ("b0", "a3"),
            ("b0", "b1"),
            ("b1", "b2"),
            ("b2", "b3"),
            ("a1", "b2"),
            ("a2", "b3"),
        ];
        for (x, y) in expected {
            assert!(has_edge(&g, x, y), "{x}-{y}");
        }
    }

    #[test]
    fn built_ins_are_triangle_free() {
        for g in [gamma(4), omega(4)] {
            let n = g.num_generators() as Letter;
            for x in 0..n {
                for y in x + 1..n {
                    for z in y + 1..n {
                        assert!(!(g.commutes(x, y) && g.commutes(y, z) && g.commutes(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn d_zero_rejected() {
        assert!(matches!(
            build_family(FamilyKind::Gamma, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn normal_form_examples() {
        let g1 = gamma(1);
        assert_eq!(nf(&g1, "a_0 a_0"), IDENTITY);
        assert_eq!(nf(&g1, "a_1 a_0"), "a0 a1");
        assert_eq!(nf(&g1, "b_1 a_0 b_1"), "a0");
        assert!(matches!(
            g1.parse_word("a0 c1"),
            Err(Error::InvalidWord(_))
        ));
        assert!(g1.normal_form(&Word(vec![9])).is_err());
    }

    #[test]
    fn is_reduced_examples() {
        let g1 = gamma(1);
        let o2 = omega(2);
        let red = |g: &PresentationGraph, w: &str| g.is_reduced(&g.parse_word(w).unwrap()).unwrap();
        assert!(red(&g1, "a_0 b_0 a_0"));
        assert!(!red(&g1, "a_0 a_1 a_0"));
        assert!(red(&o2, "c_1 b_0 c_1 b_0"));
    }

    #[test]
    fn membership_and_cosets() {
        let o1 = omega(1);
        let o2 = omega(2);
        let t1 = gamma_subset(&o1, 1).unwrap();
        let t2 = gamma_subset(&o2, 2).unwrap();
        let e = NormalForm::identity();
        assert!(o2.subgroup_membership(&e, &t2));
        let c1 = o2.parse_element("c1").unwrap();
        assert!(!o2.subgroup_membership(&c1, &t2));
        let aba = o2.parse_element("a0 b0 a0").unwrap();
        assert!(o2.subgroup_membership(&aba, &t2));
        assert!(o2.coset_min_rep(&aba, &t2).is_identity());

        let c1a0 = o1.parse_element("c1 a0").unwrap();
        assert_eq!(o1.format(&o1.coset_min_rep(&c1a0, &t1)), "c1");

        // Brute force: no element of T shortens c1 b0 c1.
        let w = o1.parse_element("c1 b0 c1").unwrap();
        for &t in t1.letters() {
            assert!(o1.mul_gen(&w, t).len() > w.len());
        }
        assert_eq!(o1.coset_min_rep(&w, &t1), w);
    }

    #[test]
    fn unknown_subset_generator() {
        let o1 = omega(1);
        assert!(matches!(
            GeneratorSet::from_names(&o1, &["a0", "zz"]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(o1.parse_generator_set("a0 zz").is_err());
    }

    #[test]
    fn json_roundtrip_and_diagnostics() {
        let g = omega(2);
        let back = PresentationGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);

        let self_loop = r#"{"generators": ["x", "y"], "edges": [["x", "y"], ["y", "y"]]}"#;
        let err = PresentationGraph::from_json(self_loop).unwrap_err().to_string();
        assert!(err.contains("edges[1]") && err.contains("self-loop"), "{err}");

        let dup = r#"{"generators": ["x", "y"], "edges": [["x", "y"], ["y", "x"]]}"#;
        let err = PresentationGraph::from_json(dup).unwrap_err().to_string();
        assert!(err.contains("edges[1]") && err.contains("duplicates"), "{err}");

        let unknown = r#"{"generators": ["x"], "edges": [["x", "q"]]}"#;
        let err = PresentationGraph::from_json(unknown).unwrap_err().to_string();
        assert!(err.contains("edges[0]") && err.contains("\"q\""), "{err}");

        let syntax = "{\"generators\": [\"x\",\n \"y\"], \"edges\": [[\"x\" \"y\"]]}";
        let err = PresentationGraph::from_json(syntax).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn distance_and_inverse() {
        let g1 = gamma(1);
        let e = NormalForm::identity();
        let ab = g1.parse_element("a0 b0").unwrap();
        assert_eq!(g1.distance(&e, &ab), 2);
        assert_eq!(g1.distance(&ab, &ab), 0);
        assert_eq!(g1.format(&g1.inverse(&ab)), "b0 a0");
        assert!(g1.mul(&ab, &g1.inverse(&ab)).is_identity());
    }

    #[test]
    fn shortlex_order() {
        let g1 = gamma(1);
        let mut v: Vec<NormalForm> = ["b0 a0", "a1", "a0 b0", "b1"]
            .iter()
            .map(|w| g1.parse_element(w).unwrap())
            .collect();
        v.sort();
        let names: Vec<String> = v.iter().map(|x| g1.format(x)).collect();
        assert_eq!(names, ["a1", "b1", "a0 b0", "b0 a0"]);
    }
}
