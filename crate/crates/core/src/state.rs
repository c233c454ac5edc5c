//! Exact sparse superpositions over walk histories.
//!
//! A basis label is the pair (α mask, walk). The path registers of the
//! physical machine hold one-hot vertex markers; here register `j + 1` is
//! stored as the vertex id `walk[j]`, which is a bijective re-encoding.
//!
//! Internally the walk is packed as a sequence of neighbor choices
//! (`ceil(log2 d)` bits each, first choice most significant) starting from a
//! fixed vertex. Because neighbor lists are ascending, comparing packed words
//! of equal length compares walks lexicographically, so a sorted term vector
//! is sorted by walk.
//!
//! Distinct histories are distinct basis states, so two branches never meet
//! and amplitudes never need to be added. That makes the `(sign, half-power)`
//! amplitude representation exact.

use std::fmt::Write as _;

use num_traits::Float;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::probability::ExactProbability;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("vertex {vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("graph with n={n}, d={d} does not fit the packed key (n <= 64 and (n-1)*ceil(log2 d) <= 128)")]
    TooLarge { n: usize, d: usize },
    #[error("term {index}: {reason}")]
    Corrupt { index: usize, reason: String },
}

/// `sign · d^{-halfpow/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Amplitude {
    pub negative: bool,
    pub halfpow: u32,
}

impl Amplitude {
    pub const ONE: Amplitude = Amplitude {
        negative: false,
        halfpow: 0,
    };

    pub fn sign(self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// Multiplies by `entry / sqrt(d)` for a nonzero `±1` matrix entry.
    #[inline]
    pub fn step(self, entry: i8) -> Amplitude {
        Amplitude {
            negative: self.negative ^ (entry < 0),
            halfpow: self.halfpow + 1,
        }
    }

    /// Numeric value for degree `d`.
    pub fn value<F: Float>(self, d: usize) -> F {
        let d = F::from(d).unwrap();
        let magnitude = d.powi(self.halfpow as i32).sqrt().recip();
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Decoded basis label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchKey {
    /// Bit `v - 1` holds the visit parity of vertex `v`.
    pub alpha: u64,
    pub walk: Vec<Vertex>,
}

/// Packed term as stored in a [`Superposition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Term {
    pub(crate) path: u128,
    pub(crate) alpha: u64,
    pub(crate) current: Vertex,
    pub(crate) amp: Amplitude,
}

impl Term {
    /// Ordering key; `path` alone is unique for a fixed step count.
    #[inline]
    pub(crate) fn key(&self) -> u128 {
        self.path
    }
}

/// Parity fold of a walk: bit of `walk[0]` set, then each later vertex toggled.
pub fn parity_fold(walk: &[Vertex]) -> u64 {
    let mut alpha = 0u64;
    for (j, &v) in walk.iter().enumerate() {
        if j == 0 {
            alpha = 1 << (v - 1);
        } else {
            alpha ^= 1 << (v - 1);
        }
    }
    alpha
}

/// Bits per packed neighbor choice.
pub(crate) fn choice_bits(d: usize) -> u32 {
    (usize::BITS - (d.max(2) - 1).leading_zeros()).max(1)
}

/// An exact superposition after a fixed number of steps from one start vertex.
#[derive(Debug, Clone)]
pub struct Superposition<'g> {
    graph: &'g Graph,
    start: Vertex,
    steps: usize,
    pub(crate) terms: Vec<Term>,
}

/// The single-term starting state: α has only `start` set, walk is `[start]`.
pub fn initial_state(graph: &Graph, start: Vertex) -> Result<Superposition<'_>, StateError> {
    if !graph.contains(start) {
        return Err(StateError::VertexOutOfRange {
            vertex: start,
            n: graph.n(),
        });
    }
    let bits = choice_bits(graph.degree()) as usize;
    if graph.n() > 64 || (graph.n() - 1) * bits > 128 {
        return Err(StateError::TooLarge {
            n: graph.n(),
            d: graph.degree(),
        });
    }
    Ok(Superposition {
        graph,
        start,
        steps: 0,
        terms: vec![Term {
            path: 0,
            alpha: 1 << (start - 1),
            current: start,
            amp: Amplitude::ONE,
        }],
    })
}

impl<'g> Superposition<'g> {
    pub(crate) fn from_parts(graph: &'g Graph, start: Vertex, steps: usize, terms: Vec<Term>) -> Self {
        Superposition {
            graph,
            start,
            steps,
            terms,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of terms.
    pub fn state_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ d^{-halfpow}` exactly.
    ///
    /// # Panics
    /// If the numerator overflows 128 bits, which needs mixed half-powers far
    /// beyond any reachable step count.
    pub fn norm_squared(&self) -> ExactProbability {
        let d = self.graph.degree() as u32;
        if self.terms.is_empty() {
            return ExactProbability::zero(d);
        }
        ExactProbability::sum_of_inverse_powers(d, self.terms.iter().map(|t| t.amp.halfpow))
            .expect("norm numerator overflow")
    }

    fn decode_walk(&self, term: &Term) -> Vec<Vertex> {
        let bits = choice_bits(self.graph.degree());
        let mask = (1u128 << bits) - 1;
        let mut walk = Vec::with_capacity(self.steps + 1);
        let mut v = self.start;
        walk.push(v);
        for t in 0..self.steps {
            let shift = (self.steps - 1 - t) as u32 * bits;
            let choice = ((term.path >> shift) & mask) as usize;
            v = self.graph.neighbors(v)[choice];
            walk.push(v);
        }
        walk
    }

    /// Decoded terms in walk-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (BranchKey, Amplitude)> + '_ {
        self.terms.iter().map(|t| {
            (
                BranchKey {
                    alpha: t.alpha,
                    walk: self.decode_walk(t),
                },
                t.amp,
            )
        })
    }

    pub fn walks(&self) -> Vec<Vec<Vertex>> {
        self.terms.iter().map(|t| self.decode_walk(t)).collect()
    }

    pub fn amplitude_of(&self, walk: &[Vertex]) -> Option<Amplitude> {
        self.terms
            .iter()
            .find(|t| self.decode_walk(t) == walk)
            .map(|t| t.amp)
    }

    /// Amplitudes as floats, in term order.
    pub fn amplitude_values<F: Float>(&self) -> Vec<F> {
        let d = self.graph.degree();
        self.terms.iter().map(|t| t.amp.value(d)).collect()
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&Term) -> bool) {
        self.terms.retain(|t| keep(t));
    }

    /// Recomputes every structural invariant: walk length, adjacency, the
    /// parity fold, the current vertex, strict key order and uniform
    /// half-power equal to the step count.
    pub fn audit(&self) -> Result<(), StateError> {
        for (index, term) in self.terms.iter().enumerate() {
            let corrupt = |reason: String| StateError::Corrupt { index, reason };
            let walk = self.decode_walk(term);
            if walk.len() != self.steps + 1 {
                return Err(corrupt(format!("walk length {}", walk.len())));
            }
            if let Some(w) = walk.windows(2).find(|w| !self.graph.is_adjacent(w[0], w[1])) {
                return Err(corrupt(format!("{} and {} are not adjacent", w[0], w[1])));
            }
            if parity_fold(&walk) != term.alpha {
                return Err(corrupt("alpha differs from parity fold of walk".into()));
            }
            if *walk.last().unwrap() != term.current {
                return Err(corrupt("cached current vertex is stale".into()));
            }
            if term.amp.halfpow as usize != self.steps {
                return Err(corrupt(format!("halfpow {} at step {}", term.amp.halfpow, self.steps)));
            }
            if index > 0 && self.terms[index - 1].key() >= term.key() {
                return Err(corrupt("keys out of order or duplicated".into()));
            }
        }
        Ok(())
    }

    /// One term per line, `<sign> d^-<k>/2 alpha=<binary> walk=<v0,v1,...>`,
    /// sorted by walk. `alpha` is written most significant bit first, so
    /// vertex 1 is the rightmost digit.
    pub fn dump(&self) -> String {
        let n = self.graph.n();
        let mut out = String::new();
        for (key, amp) in self.terms() {
            let walk: Vec<String> = key.walk.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "{} d^-{}/2 alpha={:0n$b} walk={}",
                if amp.negative { '-' } else { '+' },
                amp.halfpow,
                key.alpha,
                walk.join(","),
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin_graph;

    #[test]
    fn c4_initial_state() {
        let g = builtin_graph("c4").unwrap();
        let s = initial_state(&g, 1).unwrap();
        let terms: Vec<_> = s.terms().collect();
        assert_eq!(
            terms,
            vec![(BranchKey { alpha: 0b0001, walk: vec![1] }, Amplitude::ONE)]
        );
        assert_eq!(s.steps(), 0);
        assert_eq!(s.state_count(), 1);
        assert_eq!(s.norm_squared(), ExactProbability::one(2));
        s.audit().unwrap();
    }

    #[test]
    fn cube8_initial_state() {
        let g = builtin_graph("cube8").unwrap();
        let s = initial_state(&g, 1).unwrap();
        assert_eq!(s.terms().next().unwrap().0.alpha, 0b0000_0001);
        assert_eq!(s.dump(), "+ d^-0/2 alpha=00000001 walk=1\n");
    }

    #[test]
    fn out_of_range_start() {
        let g = builtin_graph("c4").unwrap();
        assert_eq!(
            initial_state(&g, 5).unwrap_err(),
            StateError::VertexOutOfRange { vertex: 5, n: 4 }
        );
        assert!(initial_state(&g, 0).is_err());
    }

    #[test]
    fn parity_fold_examples() {
        assert_eq!(parity_fold(&[1, 2, 1]), 0b0010);
        assert_eq!(parity_fold(&[1, 2, 3]), 0b0111);
        assert_eq!(parity_fold(&[1, 2, 1, 2]), 0);
        assert_eq!(parity_fold(&[1, 4, 3, 2]), 0b1111);
    }

    #[test]
    fn choice_bit_widths() {
        assert_eq!(choice_bits(1), 1);
        assert_eq!(choice_bits(2), 1);
        assert_eq!(choice_bits(3), 2);
        assert_eq!(choice_bits(4), 2);
        assert_eq!(choice_bits(5), 3);
    }

    #[test]
    fn amplitude_values() {
        let a = Amplitude::ONE.step(1).step(-1);
        assert_eq!(a, Amplitude { negative: true, halfpow: 2 });
        assert!((a.value::<f64>(3) + 1.0 / 3.0).abs() < 1e-15);
        assert!((Amplitude::ONE.step(1).value::<f32>(2) - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }
}
