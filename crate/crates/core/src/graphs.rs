//! Overlap graphs `G_S`, de Bruijn graphs `D_U`, and the certificates for
//! dominant-eigenvalue structure that their connectivity gives.
//!
//! The infinite graph on the cube whose paths carry the operator is never
//! built. Only the finite sufficient conditions are checked, so a verdict
//! of [`Certificate::None`] means "unknown", not "fails".

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_integer::Integer;
use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{permutations, standardize, DescentSet, DescentWord, Pattern, PatternSet};

/// Minimal read access shared by the graphs here.
pub trait Digraph {
    fn vertex_count(&self) -> usize;
    fn arcs(&self) -> Vec<(usize, usize)>;
}

/// A bare digraph on `0..n`, for tests and ad hoc use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Digraph for SimpleDigraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.clone()
    }
}

/// Vertices `S_m`; an edge `pi -> sigma` labelled `tau` for every allowed
/// `tau` of length `m+1` with `tau_1..tau_m ~ pi` and `tau_2..tau_{m+1} ~ sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGraph {
    m: usize,
    vertices: Vec<Pattern>,
    edges: Vec<(usize, usize, Pattern)>,
}

impl OverlapGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> &[Pattern] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, Pattern)] {
        &self.edges
    }

    pub fn to_dot(&self) -> String {
        let names: Vec<String> = self.vertices.iter().map(Pattern::to_string).collect();
        let labels: Vec<String> = self.edges.iter().map(|e| e.2.to_string()).collect();
        dot("G", &names, self.edges.iter().map(|e| (e.0, e.1)).zip(labels))
    }
}

impl Digraph for OverlapGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.0, e.1)).collect()
    }
}

pub fn build_overlap_graph(set: &PatternSet) -> OverlapGraph {
    let m = set.m();
    let vertices: Vec<Pattern> = permutations(m).collect();
    let mut edges: Vec<(usize, usize, Pattern)> = permutations(m + 1)
        .filter(|tau| !set.contains(tau))
        .map(|tau| {
            let e = tau.entries();
            let from = standardize(&e[..m]).expect("distinct").rank();
            let to = standardize(&e[1..]).expect("distinct").rank();
            (from, to, tau)
        })
        .collect();
    edges.sort();
    OverlapGraph { m, vertices, edges }
}

/// Vertices `{a,b}^(m-1)`; an edge `xu -> uy` labelled `xuy` for every word
/// `xuy` of length `m` outside `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnGraph {
    m: usize,
    vertices: Vec<DescentWord>,
    edges: Vec<(usize, usize, DescentWord)>,
}

impl DeBruijnGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> &[DescentWord] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, DescentWord)] {
        &self.edges
    }

    pub fn to_dot(&self) -> String {
        let names: Vec<String> = self.vertices.iter().map(DescentWord::to_string).collect();
        let labels: Vec<String> = self.edges.iter().map(|e| e.2.to_string()).collect();
        dot("D", &names, self.edges.iter().map(|e| (e.0, e.1)).zip(labels))
    }
}

impl Digraph for DeBruijnGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.0, e.1)).collect()
    }
}

pub fn build_de_bruijn(u: &DescentSet) -> Result<DeBruijnGraph> {
    let m = u.m();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("de Bruijn graph needs words of length >= 2, got {m}")));
    }
    let vertices: Vec<DescentWord> = DescentWord::all(m - 1).collect();
    let low = (1usize << (m - 1)) - 1;
    let edges = DescentWord::all(m)
        .filter(|w| !u.contains(w))
        .map(|w| {
            let i = w.index();
            (i >> 1, i & low, w)
        })
        .collect();
    Ok(DeBruijnGraph { m, vertices, edges })
}

/// Builds `D_U` from loose words, rejecting mixed lengths.
pub fn de_bruijn_from_words(words: impl IntoIterator<Item = DescentWord>) -> Result<DeBruijnGraph> {
    build_de_bruijn(&DescentSet::from_words(words)?)
}

fn dot(name: &str, vertices: &[String], edges: impl Iterator<Item = ((usize, usize), String)>) -> String {
    let mut out = format!("digraph {name} {{\n");
    for v in vertices {
        let _ = writeln!(out, "  \"{v}\";");
    }
    for ((a, b), label) in edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{label}\"];", vertices[a], vertices[b]);
    }
    out.push_str("}\n");
    out
}

/// True when all vertices lie in one strongly connected component.
pub fn strongly_connected<G: Digraph + ?Sized>(g: &G) -> Result<bool> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut pg = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        pg.add_node(());
    }
    for (a, b) in g.arcs() {
        pg.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    Ok(kosaraju_scc(&pg).len() == 1)
}

/// Gcd of closed-walk lengths, from a BFS layering: the gcd over all edges
/// `u -> v` of `level(u) + 1 - level(v)`.
pub fn period<G: Digraph + ?Sized>(g: &G) -> Result<usize> {
    if !strongly_connected(g)? {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.vertex_count();
    let arcs = g.arcs();
    if arcs.is_empty() {
        return Err(Error::NoCycles);
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &arcs {
        adj[a].push(b);
    }
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let d = arcs
        .iter()
        .map(|&(a, b)| (level[a] as i64 + 1 - level[b] as i64).unsigned_abs() as usize)
        .fold(0, |acc, x| acc.gcd(&x));
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// `G_S` strongly connected and both monotone patterns allowed.
    ErgodicViaG,
    /// Every forbidden pattern indecomposable and the decreasing one allowed.
    IndecomposableSet,
    /// `D_U` strongly connected with period one.
    DescentErgodic,
    /// `D_U` strongly connected with period `d > 1`.
    DescentPeriodic,
    /// A single monotone pattern, handled through its descent word.
    MonotoneReduced,
    None,
}

/// Symmetries of the cube that preserve the counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Complement,
    Reverse,
    ReverseComplement,
}

impl Symmetry {
    pub fn apply(self, set: &PatternSet) -> PatternSet {
        match self {
            Symmetry::Complement => set.complement(),
            Symmetry::Reverse => set.reverse(),
            Symmetry::ReverseComplement => set.reverse().complement(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub strongly_connected: bool,
    pub period: Option<usize>,
    pub certificate: Certificate,
    pub implication: String,
    /// Image of the set the certificate was issued for, when not the set itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<Symmetry>,
}

impl Verdict {
    /// Whether the certificate guarantees a simple positive dominant eigenvalue.
    pub fn certifies_simple_dominant(&self) -> bool {
        matches!(
            self.certificate,
            Certificate::ErgodicViaG
                | Certificate::IndecomposableSet
                | Certificate::DescentErgodic
                | Certificate::MonotoneReduced
        )
    }
}

const SIMPLE_DOMINANT: &str =
    "T is positivity improving: r(T) is a simple positive eigenvalue with a positive eigenfunction, \
     every other eigenvalue is smaller in modulus, and alpha_n/n! = c*lambda^n + O(r^n) with r < lambda";

fn graph_facts<G: Digraph>(g: &G) -> (bool, Option<usize>) {
    let sc = strongly_connected(g).unwrap_or(false);
    let p = if sc { period(g).ok() } else { None };
    (sc, p)
}

fn descent_verdict(u: &DescentSet) -> Result<Verdict> {
    let d = build_de_bruijn(u)?;
    let (sc, p) = graph_facts(&d);
    let (certificate, implication) = match p {
        Some(1) => (Certificate::DescentErgodic, SIMPLE_DOMINANT.to_string()),
        Some(k) => (
            Certificate::DescentPeriodic,
            format!(
                "the spectrum of T is invariant under multiplication by exp(2*pi*i/{k}); \
                 the peripheral spectrum has {k} eigenvalues of equal modulus"
            ),
        ),
        None => (Certificate::None, "D_U is not strongly connected; no certificate".to_string()),
    };
    Ok(Verdict { strongly_connected: sc, period: p, certificate, implication, via: None })
}

// Routes that look only at S: indecomposable members, then G_S itself.
fn pattern_routes(set: &PatternSet, g: &OverlapGraph) -> Option<Certificate> {
    let decreasing = Pattern::decreasing(set.m() + 1);
    if !set.is_empty() && set.members().all(Pattern::is_indecomposable) && !set.contains(&decreasing) {
        return Some(Certificate::IndecomposableSet);
    }
    let monotone_free = !set.contains_increasing() && !set.contains_decreasing();
    if monotone_free && strongly_connected(g).unwrap_or(false) {
        return Some(Certificate::ErgodicViaG);
    }
    None
}

/// Certificate for a pattern set, optionally given as `S(U)`.
pub fn classify(set: &PatternSet, descent: Option<&DescentSet>) -> Result<Verdict> {
    if let Some(u) = descent.filter(|u| u.m() >= 2) {
        return descent_verdict(u);
    }
    let g = build_overlap_graph(set);
    let (sc, p) = graph_facts(&g);
    let issued = |certificate, via| Verdict {
        strongly_connected: sc,
        period: p,
        certificate,
        implication: SIMPLE_DOMINANT.into(),
        via,
    };
    if let Some(c) = pattern_routes(set, &g) {
        return Ok(issued(c, None));
    }
    if set.len() == 1 && (set.contains_increasing() || set.contains_decreasing()) && set.m() >= 2 {
        // 12..k avoidance is S({a^m}); its de Bruijn graph keeps the other loop.
        let u = set.as_descent_set().expect("monotone singleton is descent-closed");
        let dv = descent_verdict(&u)?;
        if dv.certificate == Certificate::DescentErgodic {
            return Ok(issued(Certificate::MonotoneReduced, None));
        }
    }
    for sym in [Symmetry::Complement, Symmetry::Reverse, Symmetry::ReverseComplement] {
        let image = sym.apply(set);
        if image == *set {
            continue;
        }
        if let Some(c) = pattern_routes(&image, &build_overlap_graph(&image)) {
            return Ok(issued(c, Some(sym)));
        }
    }
    let implication = if sc {
        "G_S is strongly connected but a monotone pattern is forbidden; no certificate".to_string()
    } else {
        "G_S is not strongly connected; no certificate".to_string()
    };
    Ok(Verdict { strongly_connected: sc, period: p, certificate: Certificate::None, implication, via: None })
}
