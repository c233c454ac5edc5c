//! One step of the walk: the controlled step operator applied to every branch.
//!
//! The operator for step `j` conditioned on vertex `i` (written both `U^j_i`
//! and `R^j_i`; they are the same family) only fires on branches whose
//! register `j` marks vertex `i`. Every branch marks exactly one vertex, so
//! applying the product over all `i` is the same as visiting each branch once
//! and applying the operator for its own current vertex. That is what
//! [`apply_step`] does; its cost is linear in the number of live branches.
//!
//! For a branch at vertex `v` with neighbors `a < b < c < ...`, the α bits at
//! those neighbors form the input word `w` (smallest neighbor most
//! significant). Column `w` of the signing has one nonzero entry per
//! neighbor; each one spawns a successor with that neighbor's α bit toggled,
//! the neighbor appended to the walk, the sign multiplied by the entry and
//! the half-power incremented.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::signing::{FlipUnitary, SigningError};
use crate::state::{choice_bits, initial_state, StateError, Superposition, Term};

/// Terms below this count are stepped on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvolutionError {
    #[error("step {requested} exceeds the {max} steps that fit in {max_plus_one} registers", max_plus_one = .max + 1)]
    StepLimitExceeded { requested: usize, max: usize },
    #[error("two successors share the key {0:#x}")]
    InternalCollision(u128),
    #[error("signing has degree {signing}, graph has degree {graph}")]
    DegreeMismatch { signing: usize, graph: usize },
    #[error("term count {needed} would exceed the cap of {cap}")]
    TermLimit { needed: usize, cap: usize },
    #[error(transparent)]
    Signing(#[from] SigningError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Options shared by every step of a run.
#[derive(Debug, Clone)]
pub struct StepOptions {
    pub signing: FlipUnitary,
    /// Drop branches that can no longer reach α = all-ones by the horizon.
    pub prune: bool,
    /// Total steps the run will take; pruning is relative to this. Defaults
    /// to `n - 1`.
    pub horizon: Option<usize>,
    /// Abort instead of producing more than this many terms.
    pub max_terms: Option<usize>,
}

impl StepOptions {
    pub fn new(signing: FlipUnitary) -> Self {
        StepOptions {
            signing,
            prune: false,
            horizon: None,
            max_terms: None,
        }
    }

    /// Unpruned options using the recursive signing for `graph`'s degree.
    pub fn for_graph(graph: &Graph) -> Result<Self, EvolutionError> {
        Ok(Self::new(crate::signing::build_flip_unitary(graph.degree())?))
    }

    pub fn pruned(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn with_max_terms(mut self, cap: usize) -> Self {
        self.max_terms = Some(cap);
        self
    }
}

/// Telemetry for one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStats {
    pub step: usize,
    pub terms: usize,
    pub pruned: usize,
    pub elapsed: Duration,
}

impl fmt::Display for StepStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} terms={} pruned={} ms={}",
            self.step,
            self.terms,
            self.pruned,
            self.elapsed.as_millis()
        )
    }
}

/// A branch survives conservative pruning iff the number of zero α bits can
/// still be driven to zero: each step toggles one bit, so it needs
/// `zeros <= remaining` and `zeros ≡ remaining (mod 2)`.
#[inline]
fn can_reach_all_ones(alpha: u64, n: usize, remaining: usize) -> bool {
    let zeros = n - alpha.count_ones() as usize;
    zeros <= remaining && (remaining - zeros).is_multiple_of(2)
}

/// Advances `state` by one step.
pub fn apply_step<'g>(
    state: &Superposition<'g>,
    opts: &StepOptions,
) -> Result<(Superposition<'g>, StepStats), EvolutionError> {
    let started = Instant::now();
    let graph = state.graph();
    let d = graph.degree();
    if opts.signing.degree() != d {
        return Err(EvolutionError::DegreeMismatch {
            signing: opts.signing.degree(),
            graph: d,
        });
    }
    let next_step = state.steps() + 1;
    let max = graph.n() - 1;
    if next_step > max {
        return Err(EvolutionError::StepLimitExceeded {
            requested: next_step,
            max,
        });
    }
    let horizon = opts.horizon.unwrap_or(max).min(max);
    let remaining = horizon.saturating_sub(next_step);
    let unpruned = state.state_count() * d;
    if let Some(cap) = opts.max_terms {
        if !opts.prune && unpruned > cap {
            return Err(EvolutionError::TermLimit { needed: unpruned, cap });
        }
    }

    let bits = choice_bits(d);
    let n = graph.n();
    let prune = opts.prune;
    let signing = &opts.signing;
    let successors = move |parent: &Term| {
        let parent = *parent;
        let nbrs = graph.neighbors(parent.current);
        let word = input_word(parent.alpha, nbrs);
        nbrs.iter().enumerate().filter_map(move |(i, &next)| {
            let out = word ^ (1 << (d - 1 - i));
            let entry = signing.entry(out, word);
            debug_assert!(entry != 0, "flip unitary support broken");
            let alpha = parent.alpha ^ (1 << (next - 1));
            if prune && !can_reach_all_ones(alpha, n, remaining) {
                return None;
            }
            Some(Term {
                path: (parent.path << bits) | i as u128,
                alpha,
                current: next,
                amp: parent.amp.step(entry),
            })
        })
    };

    let terms: Vec<Term> = if state.terms.len() < PARALLEL_THRESHOLD {
        state.terms.iter().flat_map(successors).collect()
    } else {
        state.terms.par_iter().flat_map_iter(successors).collect()
    };

    // Parents are key-sorted and children are emitted in choice order, so
    // the output must be strictly increasing.
    if let Some(w) = terms.windows(2).find(|w| w[0].key() >= w[1].key()) {
        return Err(EvolutionError::InternalCollision(w[1].key()));
    }
    if let Some(cap) = opts.max_terms {
        if terms.len() > cap {
            return Err(EvolutionError::TermLimit { needed: terms.len(), cap });
        }
    }

    let stats = StepStats {
        step: next_step,
        terms: terms.len(),
        pruned: unpruned - terms.len(),
        elapsed: started.elapsed(),
    };
    Ok((
        Superposition::from_parts(graph, state.start(), next_step, terms),
        stats,
    ))
}

/// The α bits at `nbrs`, first neighbor most significant.
#[inline]
fn input_word(alpha: u64, nbrs: &[Vertex]) -> usize {
    nbrs.iter()
        .fold(0usize, |w, &v| (w << 1) | ((alpha >> (v - 1)) & 1) as usize)
}

/// Result of [`run_walk`]: the final state plus per-step telemetry.
#[derive(Debug, Clone)]
pub struct WalkRun<'g> {
    pub state: Superposition<'g>,
    pub telemetry: Vec<StepStats>,
}

/// Folds [`apply_step`] over `steps` steps (default `n - 1`) from `start`.
///
/// `on_step` sees each step's telemetry as soon as it is produced.
pub fn run_walk<'g>(
    graph: &'g Graph,
    start: Vertex,
    steps: Option<usize>,
    opts: &StepOptions,
    mut on_step: impl FnMut(&StepStats),
) -> Result<WalkRun<'g>, EvolutionError> {
    let max = graph.n() - 1;
    let steps = steps.unwrap_or(max);
    if steps > max {
        return Err(EvolutionError::StepLimitExceeded { requested: steps, max });
    }
    let mut opts = opts.clone();
    opts.horizon = Some(steps);

    let mut state = initial_state(graph, start)?;
    let mut telemetry = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, stats) = apply_step(&state, &opts)?;
        on_step(&stats);
        telemetry.push(stats);
        state = next;
    }
    Ok(WalkRun { state, telemetry })
}

/// Controlled-operator applications in the alternating schedule: the first
/// step fires once (only the start vertex is occupied), and every later step
/// fires once per vertex of the colour class the walker currently sits in.
pub fn gate_count(graph: &Graph, steps: usize) -> usize {
    let parts = graph.parts();
    (1..=steps)
        .map(|j| if j == 1 { 1 } else { parts[(j - 1) % 2].len() })
        .sum()
}
