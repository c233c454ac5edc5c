//! Classical ground truth: Hamiltonian path and cycle enumeration by
//! backtracking, and walk counting by iterated adjacency.

use serde::Serialize;
use thiserror::Error;

use crate::evolution::{run_walk, EvolutionError, StepOptions};
use crate::graph::{Graph, Vertex};
use crate::postselect::{postselect, FilterMode};
use crate::signing::{verify_flip_unitary, FlipUnitary, SignMatrix, SigningError};

/// Largest vertex count [`enumerate_hamiltonian`] accepts.
pub const MAX_ORACLE_VERTICES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {0} vertices; the enumeration oracle handles at most {MAX_ORACLE_VERTICES}")]
    TooLarge(usize),
    #[error("vertex {vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("walk count overflows 128 bits at length {0}")]
    Overflow(usize),
    #[error("signing rejected before comparison: {0}")]
    BadSigning(SigningError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

/// Directed Hamiltonian paths and cycles anchored at one start vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub ham_paths: Vec<Vec<Vertex>>,
    /// Paths whose last vertex is adjacent to the start.
    pub ham_cycles: Vec<Vec<Vertex>>,
    /// Entry `j` is the number of length-`j` walks from the start, `j < n`.
    pub walk_counts: Vec<u128>,
}

impl EnumerationResult {
    /// Undirected cycle count; each cycle through the start appears once per
    /// direction. A 2-vertex graph has one degenerate "cycle" over its edge.
    pub fn undirected_cycle_count(&self) -> usize {
        match self.ham_cycles.first() {
            Some(c) if c.len() <= 2 => self.ham_cycles.len(),
            _ => self.ham_cycles.len() / 2,
        }
    }
}

fn check(graph: &Graph, start: Vertex) -> Result<(), OracleError> {
    if graph.n() > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge(graph.n()));
    }
    if !graph.contains(start) {
        return Err(OracleError::VertexOutOfRange { vertex: start, n: graph.n() });
    }
    Ok(())
}

/// Exhaustive depth-first enumeration. Output is lexicographically sorted
/// because neighbors are tried in ascending order.
pub fn enumerate_hamiltonian(graph: &Graph, start: Vertex) -> Result<EnumerationResult, OracleError> {
    check(graph, start)?;
    let mut paths = Vec::new();
    let mut path = vec![start];
    plain_search(graph, 1u64 << (start - 1), &mut path, &mut paths);
    finish(graph, start, paths)
}

/// Same enumeration with a dead-end cut: an unvisited vertex with no free
/// neighbor is unreachable, and one with a single free neighbor can only be
/// the final vertex, so two of those cannot coexist.
pub fn enumerate_hamiltonian_pruned(graph: &Graph, start: Vertex) -> Result<EnumerationResult, OracleError> {
    check(graph, start)?;
    let mut paths = Vec::new();
    let mut path = vec![start];
    pruned_search(graph, 1u64 << (start - 1), &mut path, &mut paths);
    finish(graph, start, paths)
}

fn finish(graph: &Graph, start: Vertex, ham_paths: Vec<Vec<Vertex>>) -> Result<EnumerationResult, OracleError> {
    let ham_cycles = ham_paths
        .iter()
        .filter(|p| graph.is_adjacent(*p.last().unwrap(), start))
        .cloned()
        .collect();
    let walk_counts = (0..graph.n())
        .map(|j| count_walks(graph, start, j))
        .collect::<Result<_, _>>()?;
    Ok(EnumerationResult {
        ham_paths,
        ham_cycles,
        walk_counts,
    })
}

fn plain_search(graph: &Graph, visited: u64, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    if path.len() == graph.n() {
        out.push(path.clone());
        return;
    }
    let here = *path.last().unwrap();
    for &next in graph.neighbors(here) {
        let bit = 1u64 << (next - 1);
        if visited & bit == 0 {
            path.push(next);
            plain_search(graph, visited | bit, path, out);
            path.pop();
        }
    }
}

fn pruned_search(graph: &Graph, visited: u64, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    if path.len() == graph.n() {
        out.push(path.clone());
        return;
    }
    let here = *path.last().unwrap();
    let mut forced_ends = 0;
    for v in 1..=graph.n() as Vertex {
        if visited & (1 << (v - 1)) != 0 {
            continue;
        }
        let free = graph
            .neighbors(v)
            .iter()
            .filter(|&&w| w == here || visited & (1 << (w - 1)) == 0)
            .count();
        match free {
            0 => return,
            // The only unvisited vertex left may also be entered as the end.
            1 if path.len() + 1 < graph.n() => forced_ends += 1,
            _ => {}
        }
    }
    if forced_ends > 1 {
        return;
    }
    for &next in graph.neighbors(here) {
        let bit = 1u64 << (next - 1);
        if visited & bit == 0 {
            path.push(next);
            pruned_search(graph, visited | bit, path, out);
            path.pop();
        }
    }
}

/// Number of length-`j` walks from `start`, by iterated adjacency counting.
pub fn count_walks(graph: &Graph, start: Vertex, j: usize) -> Result<u128, OracleError> {
    if !graph.contains(start) {
        return Err(OracleError::VertexOutOfRange { vertex: start, n: graph.n() });
    }
    let mut counts = vec![0u128; graph.n()];
    counts[start as usize - 1] = 1;
    for len in 0..j {
        let mut next = vec![0u128; graph.n()];
        for v in 1..=graph.n() as Vertex {
            let c = counts[v as usize - 1];
            if c == 0 {
                continue;
            }
            for &w in graph.neighbors(v) {
                let slot = &mut next[w as usize - 1];
                *slot = slot.checked_add(c).ok_or(OracleError::Overflow(len + 1))?;
            }
        }
        counts = next;
    }
    counts
        .into_iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c))
        .ok_or(OracleError::Overflow(j))
}

/// Set difference between the simulated survivors and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub mode: FilterMode,
    pub quantum_count: usize,
    pub oracle_count: usize,
    /// In the oracle but not among survivors.
    pub missing: Vec<Vec<Vertex>>,
    /// Among survivors but not in the oracle.
    pub extra: Vec<Vec<Vertex>>,
}

impl CompareReport {
    pub fn matches(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Runs the full `n - 1` step walk and projection, then diffs the survivor
/// walks against the oracle. The candidate signing is verified first; an
/// invalid one is rejected before anything is simulated.
pub fn compare_with_quantum(
    graph: &Graph,
    start: Vertex,
    mode: FilterMode,
    signing: &SignMatrix,
    prune: bool,
) -> Result<CompareReport, OracleError> {
    let report = verify_flip_unitary(signing, graph.degree()).map_err(OracleError::BadSigning)?;
    if !report.is_valid() {
        return Err(OracleError::BadSigning(SigningError::NotFlipUnitary(report)));
    }
    let unitary = FlipUnitary::from_matrix(signing.clone(), graph.degree()).map_err(OracleError::BadSigning)?;
    let oracle = enumerate_hamiltonian(graph, start)?;

    let opts = StepOptions::new(unitary).pruned(prune);
    let run = run_walk(graph, start, None, &opts, |_| {})?;
    let survivors = postselect(run.state, mode).walks();
    let expected = match mode {
        FilterMode::Path => oracle.ham_paths,
        FilterMode::Cycle => oracle.ham_cycles,
    };
    Ok(diff(mode, survivors, expected))
}

fn diff(mode: FilterMode, quantum: Vec<Vec<Vertex>>, oracle: Vec<Vec<Vertex>>) -> CompareReport {
    // Both lists are sorted and duplicate-free.
    let missing = oracle
        .iter()
        .filter(|w| quantum.binary_search(w).is_err())
        .cloned()
        .collect();
    let extra = quantum
        .iter()
        .filter(|w| oracle.binary_search(w).is_err())
        .cloned()
        .collect();
    CompareReport {
        mode,
        quantum_count: quantum.len(),
        oracle_count: oracle.len(),
        missing,
        extra,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin_graph;
    use crate::signing::build_flip_unitary;

    #[test]
    fn c4_paths_and_cycles() {
        let g = builtin_graph("c4").unwrap();
        let r = enumerate_hamiltonian(&g, 1).unwrap();
        assert_eq!(r.ham_paths, vec![vec![1, 2, 3, 4], vec![1, 4, 3, 2]]);
        assert_eq!(r.ham_cycles, r.ham_paths);
        assert_eq!(r.walk_counts, vec![1, 2, 4, 8]);
        assert_eq!(r.undirected_cycle_count(), 1);
    }

    #[test]
    fn k33_has_twelve_anchored_cycles() {
        let g = builtin_graph("k33").unwrap();
        let r = enumerate_hamiltonian(&g, 1).unwrap();
        assert_eq!(r.ham_cycles.len(), 12);
        assert_eq!(r.undirected_cycle_count(), 6);
        // Every Hamiltonian path in K33 ends in the opposite class, adjacent to 1.
        assert_eq!(r.ham_paths, r.ham_cycles);
    }

    #[test]
    fn variants_agree_on_builtins() {
        for name in ["c4", "k33", "cube8", "prism12", "heawood", "moebius_kantor"] {
            let g = builtin_graph(name).unwrap();
            for start in [1, g.n() as Vertex] {
                assert_eq!(
                    enumerate_hamiltonian(&g, start).unwrap(),
                    enumerate_hamiltonian_pruned(&g, start).unwrap(),
                    "{name} from {start}"
                );
            }
        }
    }

    #[test]
    fn walk_counts() {
        let c4 = builtin_graph("c4").unwrap();
        assert_eq!(count_walks(&c4, 1, 2).unwrap(), 4);
        assert_eq!(count_walks(&c4, 1, 0).unwrap(), 1);
        let cube = builtin_graph("cube8").unwrap();
        assert_eq!(count_walks(&cube, 1, 7).unwrap(), 2187);
        assert!(matches!(count_walks(&cube, 1, 90), Err(OracleError::Overflow(_))));
        assert!(count_walks(&cube, 9, 1).is_err());
    }

    #[test]
    fn relabelling_within_orbit() {
        // c4 and k33 are vertex-transitive: path counts match for every start.
        for name in ["c4", "k33"] {
            let g = builtin_graph(name).unwrap();
            let base = enumerate_hamiltonian(&g, 1).unwrap();
            for start in 2..=g.n() as Vertex {
                let r = enumerate_hamiltonian(&g, start).unwrap();
                assert_eq!(r.ham_paths.len(), base.ham_paths.len());
                assert_eq!(r.ham_cycles.len(), base.ham_cycles.len());
            }
        }
    }

    #[test]
    fn compare_guards_signing() {
        let g = builtin_graph("cube8").unwrap();
        let mut m = build_flip_unitary(3).unwrap().matrix().clone();
        m.set(0, 1, -1);
        assert!(matches!(
            compare_with_quantum(&g, 1, FilterMode::Path, &m, false),
            Err(OracleError::BadSigning(SigningError::NotFlipUnitary(_)))
        ));
        let wrong_size = build_flip_unitary(2).unwrap().matrix().clone();
        assert!(matches!(
            compare_with_quantum(&g, 1, FilterMode::Path, &wrong_size, false),
            Err(OracleError::BadSigning(SigningError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn compare_small() {
        let c4 = builtin_graph("c4").unwrap();
        let v2 = build_flip_unitary(2).unwrap();
        assert!(compare_with_quantum(&c4, 1, FilterMode::Cycle, v2.matrix(), false).unwrap().matches());
        let cube = builtin_graph("cube8").unwrap();
        let v3 = build_flip_unitary(3).unwrap();
        let r = compare_with_quantum(&cube, 1, FilterMode::Path, v3.matrix(), false).unwrap();
        assert!(r.matches(), "{r:?}");
        assert!(r.oracle_count > 0);
    }

    #[test]
    fn too_large() {
        let g = builtin_graph("prism28").unwrap();
        assert_eq!(enumerate_hamiltonian(&g, 1).unwrap_err(), OracleError::TooLarge(28));
    }
}
