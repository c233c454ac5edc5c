//! Simple, regular, bipartite, connected graphs.
//!
//! Vertices are labelled `1..=n`. Internally vertex `v` owns bit `v - 1` of
//! every mask. Neighbor lists are kept sorted ascending; that order is what
//! maps a vertex's neighbors onto the qubit slots of the flip unitary, with
//! the smallest neighbor on the most significant bit.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// 1-based vertex label.
pub type Vertex = u32;

/// Maximum number of sampling attempts in [`random_regular_bipartite`].
pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// A property a candidate adjacency structure fails to satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A self-loop, a repeated neighbor, or a neighbor label outside `1..=n`.
    NotSimple,
    /// Degrees are not all equal (or the graph has no edges at all).
    NotRegular { min: usize, max: usize },
    NotBipartite,
    NotConnected,
    NotSymmetric,
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::NotSimple => "NotSimple",
            Violation::NotRegular { .. } => "NotRegular",
            Violation::NotBipartite => "NotBipartite",
            Violation::NotConnected => "NotConnected",
            Violation::NotSymmetric => "NotSymmetric",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotRegular { min, max } => write!(f, "NotRegular(min={min}, max={max})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid graph: {}", list_violations(.0))]
    Validation(Vec<Violation>),
    #[error("unknown built-in graph `{0}`")]
    UnknownName(String),
    #[error("could not generate a simple connected graph after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("vertex {vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
}

fn list_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// An edge list exactly as read from a graph file, before any validation
/// beyond syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl RawGraph {
    /// Adjacency lists indexed by `v - 1`, in insertion order.
    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, w) in &self.edges {
            adj[u as usize - 1].push(w);
            adj[w as usize - 1].push(u);
        }
        adj
    }
}

/// Parses the line-oriented graph file format, checking syntax only.
///
/// ```text
/// # comment
/// v 4
/// e 1 2
/// e 2 3
/// ```
pub fn parse_raw(text: &str) -> Result<RawGraph, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| GraphError::Syntax {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match (n, fields.as_slice()) {
            (None, ["v", count]) => {
                let count: usize = count
                    .parse()
                    .map_err(|_| err(format!("bad vertex count `{count}`")))?;
                if count == 0 {
                    return Err(err("vertex count must be positive".into()));
                }
                if count > 64 {
                    return Err(err(format!("at most 64 vertices are supported, got {count}")));
                }
                n = Some(count);
            }
            (None, _) => return Err(err("expected `v <n>` header".into())),
            (Some(count), ["e", u, w]) => {
                let parse_vertex = |s: &str| {
                    s.parse::<Vertex>()
                        .map_err(|_| err(format!("bad vertex label `{s}`")))
                };
                let (u, w) = (parse_vertex(u)?, parse_vertex(w)?);
                if u < 1 || w as usize > count || u >= w {
                    return Err(err(format!("edge {u} {w} must satisfy 1 <= u < w <= {count}")));
                }
                if !seen.insert((u, w)) {
                    return Err(err(format!("duplicate edge {u} {w}")));
                }
                edges.push((u, w));
            }
            (Some(_), ["v", ..]) => return Err(err("repeated `v` header".into())),
            (Some(_), _) => return Err(err(format!("expected `e <u> <w>`, got `{line}`"))),
        }
    }

    let n = n.ok_or(GraphError::Syntax {
        line: text.lines().count().max(1),
        message: "missing `v <n>` header".into(),
    })?;
    Ok(RawGraph { n, edges })
}

/// Parses and validates a graph file.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let raw = parse_raw(text)?;
    Graph::from_adjacency(raw.adjacency())
}

/// Checks every structural requirement and reports each failed property once,
/// in the order NotSimple, NotSymmetric, NotRegular, NotBipartite, NotConnected.
pub fn validate_graph(adjacency: &[Vec<Vertex>]) -> Vec<Violation> {
    let n = adjacency.len();
    let mut violations = Vec::new();
    let in_range = |v: Vertex| v >= 1 && v as usize <= n;

    let simple = adjacency.iter().enumerate().all(|(i, nbrs)| {
        let mut sorted = nbrs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == nbrs.len() && nbrs.iter().all(|&w| in_range(w) && w as usize != i + 1)
    });
    if !simple {
        violations.push(Violation::NotSimple);
    }

    let symmetric = adjacency.iter().enumerate().all(|(i, nbrs)| {
        nbrs.iter()
            .filter(|&&w| in_range(w))
            .all(|&w| adjacency[w as usize - 1].contains(&(i as Vertex + 1)))
    });
    if !symmetric {
        violations.push(Violation::NotSymmetric);
    }

    let min = adjacency.iter().map(Vec::len).min().unwrap_or(0);
    let max = adjacency.iter().map(Vec::len).max().unwrap_or(0);
    if min != max || max == 0 {
        violations.push(Violation::NotRegular { min, max });
    }

    // Colouring and reachability run over the symmetrised, in-range edges.
    let mut undirected = vec![Vec::new(); n];
    for (i, nbrs) in adjacency.iter().enumerate() {
        for &w in nbrs.iter().filter(|&&w| in_range(w)) {
            undirected[i].push(w as usize - 1);
            undirected[w as usize - 1].push(i);
        }
    }
    let (colour, bipartite) = two_colour(&undirected);
    if !bipartite {
        violations.push(Violation::NotBipartite);
    }
    if colour.iter().any(Option::is_none) {
        violations.push(Violation::NotConnected);
    }
    violations
}

/// BFS 2-colouring from index 0 only; unreached vertices stay `None`.
fn two_colour(undirected: &[Vec<usize>]) -> (Vec<Option<u8>>, bool) {
    let mut colour = vec![None; undirected.len()];
    let mut ok = true;
    if undirected.is_empty() {
        return (colour, ok);
    }
    colour[0] = Some(0u8);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let cu = colour[u].unwrap();
        for &w in &undirected[u] {
            match colour[w] {
                None => {
                    colour[w] = Some(1 - cu);
                    queue.push_back(w);
                }
                Some(cw) if cw == cu => ok = false,
                Some(_) => {}
            }
        }
    }
    (colour, ok)
}

/// A validated simple, d-regular, bipartite, connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    degree: usize,
    adjacency: Vec<Vec<Vertex>>,
    /// `part[v - 1]` is 0 for the class containing vertex 1, else 1.
    part: Vec<u8>,
}

impl Graph {
    pub fn from_adjacency(mut adjacency: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        let violations = validate_graph(&adjacency);
        if !violations.is_empty() {
            return Err(GraphError::Validation(violations));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let undirected: Vec<Vec<usize>> = adjacency
            .iter()
            .map(|nbrs| nbrs.iter().map(|&w| w as usize - 1).collect())
            .collect();
        let (colour, _) = two_colour(&undirected);
        Ok(Graph {
            degree: adjacency[0].len(),
            part: colour.into_iter().map(|c| c.unwrap()).collect(),
            adjacency,
        })
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, w) in edges {
            for v in [u, w] {
                if v < 1 || v as usize > n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            adjacency[u as usize - 1].push(w);
            adjacency[w as usize - 1].push(u);
        }
        Self::from_adjacency(adjacency)
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Neighbors of `v`, strictly ascending.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize - 1]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 1 && v as usize <= self.n()
    }

    pub fn is_adjacent(&self, u: Vertex, w: Vertex) -> bool {
        self.neighbors(u).binary_search(&w).is_ok()
    }

    /// Colour class of `v`: 0 for the class containing vertex 1.
    pub fn part_of(&self, v: Vertex) -> u8 {
        self.part[v as usize - 1]
    }

    /// The two colour classes, each ascending; index 0 holds vertex 1.
    pub fn parts(&self) -> [Vec<Vertex>; 2] {
        let mut parts = [Vec::new(), Vec::new()];
        for v in 1..=self.n() as Vertex {
            parts[self.part_of(v) as usize].push(v);
        }
        parts
    }

    /// Edges `(u, w)` with `u < w`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.n() * self.degree / 2);
        for u in 1..=self.n() as Vertex {
            out.extend(self.neighbors(u).iter().filter(|&&w| w > u).map(|&w| (u, w)));
        }
        out
    }

    /// Mask with one bit per vertex set.
    pub fn full_mask(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }

    /// Canonical graph-file text: header, then sorted edges.
    pub fn to_text(&self) -> String {
        let mut out = format!("v {}\n", self.n());
        for (u, w) in self.edges() {
            out.push_str(&format!("e {u} {w}\n"));
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Graph::to_text`].
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Names accepted by [`builtin_graph`]; `prism<N>` takes any even `N >= 8`
/// with `N / 2` even.
pub const BUILTIN_NAMES: &[&str] = &["c4", "k33", "cube8", "prism<N>", "heawood", "moebius_kantor"];

/// The built-in library of test graphs.
///
/// `cube8` is the 8-cycle `1..8` with chords `1-4, 2-7, 3-6, 5-8`, so vertex 1
/// has neighbors `{2, 4, 8}`.
pub fn builtin_graph(name: &str) -> Result<Graph, GraphError> {
    let edges: Vec<(Vertex, Vertex)> = match name {
        "c4" => ring(1, 4),
        "k33" => {
            let mut e = Vec::new();
            for u in [1, 3, 5] {
                for w in [2, 4, 6] {
                    e.push((u, w));
                }
            }
            e
        }
        "cube8" => {
            let mut e = ring(1, 8);
            e.extend([(1, 4), (2, 7), (3, 6), (5, 8)]);
            e
        }
        "heawood" => {
            // LCF [5, -5]^7
            let mut e = ring(1, 14);
            for i in (0..14u32).step_by(2) {
                e.push((i + 1, (i + 5) % 14 + 1));
            }
            e
        }
        "moebius_kantor" => {
            // Generalized Petersen graph GP(8, 3): outer 1..8, inner 9..16.
            let mut e = ring(1, 8);
            for i in 0..8u32 {
                e.push((i + 1, i + 9));
                e.push((i + 9, (i + 3) % 8 + 9));
            }
            e
        }
        _ => match name.strip_prefix("prism").and_then(|s| s.parse::<u32>().ok()) {
            Some(n) if n >= 6 && n % 2 == 0 => {
                let k = n / 2;
                let mut e = ring(1, k);
                e.extend(ring(k + 1, k));
                e.extend((1..=k).map(|i| (i, i + k)));
                e
            }
            _ => return Err(GraphError::UnknownName(name.to_string())),
        },
    };
    let n = edges.iter().map(|&(u, w)| u.max(w)).max().unwrap() as usize;
    Graph::from_edges(n, &edges)
}

fn ring(first: Vertex, len: Vertex) -> Vec<(Vertex, Vertex)> {
    (0..len)
        .map(|i| (first + i, first + (i + 1) % len))
        .collect()
}

/// Draws a simple connected d-regular bipartite graph on `2 * half` vertices.
///
/// Odd vertices form one class and even vertices the other. The edge set is
/// the union of `d` uniformly random perfect matchings; draws with a repeated
/// edge or more than one component are rejected.
pub fn random_regular_bipartite(half: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if d == 0 || half < d || 2 * half > 64 {
        return Err(GraphError::GenerationFailed { attempts: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..half).collect();
    'attempt: for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut taken = vec![false; half * half];
        let mut edges = Vec::with_capacity(half * d);
        for _ in 0..d {
            perm.shuffle(&mut rng);
            for (left, &right) in perm.iter().enumerate() {
                if std::mem::replace(&mut taken[left * half + right], true) {
                    continue 'attempt;
                }
                edges.push((2 * left as Vertex + 1, 2 * right as Vertex + 2));
            }
        }
        edges.sort_unstable();
        match Graph::from_edges(2 * half, &edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Validation(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(GraphError::GenerationFailed {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}
