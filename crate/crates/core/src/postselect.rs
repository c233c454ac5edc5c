//! Projection onto α = all-ones, the closure filter, and measurement.
//!
//! After `n - 1` steps, α is all-ones exactly when each of the `n - 1`
//! toggles hit a different non-start vertex and the start was never
//! revisited, i.e. when the walk is a Hamiltonian path. The projector alone
//! says nothing about the last vertex being adjacent to the start; the
//! closure filter adds that check and turns paths into anchored directed
//! cycles.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Vertex;
use crate::probability::ExactProbability;
use crate::state::Superposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Path,
    Cycle,
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::Path => "path",
            FilterMode::Cycle => "cycle",
        })
    }
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(FilterMode::Path),
            "cycle" => Ok(FilterMode::Cycle),
            other => Err(format!("unknown filter mode `{other}` (expected path or cycle)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasurementError {
    #[error("no survivors: the projected state is empty")]
    NoSurvivors,
}

/// Unrenormalised survivors of a projection.
#[derive(Debug, Clone)]
pub struct ProjectionResult<'g> {
    pub survivors: Superposition<'g>,
    pub success_probability: ExactProbability,
    pub filter_mode: FilterMode,
}

impl ProjectionResult<'_> {
    pub fn survivor_count(&self) -> usize {
        self.survivors.state_count()
    }

    pub fn walks(&self) -> Vec<Vec<Vertex>> {
        self.survivors.walks()
    }
}

/// Keeps the terms whose α register is all ones.
///
/// Intended for the state after `n - 1` steps; at fewer steps the result is
/// necessarily empty.
pub fn project_alpha_all_ones(mut state: Superposition<'_>) -> ProjectionResult<'_> {
    let full = state.graph().full_mask();
    state.retain(|t| t.alpha == full);
    finish(state, FilterMode::Path)
}

/// Keeps path-mode survivors whose last vertex is adjacent to the start.
pub fn apply_closure_filter(result: ProjectionResult<'_>) -> ProjectionResult<'_> {
    let mut state = result.survivors;
    let graph = state.graph();
    let start = state.start();
    state.retain(|t| graph.is_adjacent(t.current, start));
    finish(state, FilterMode::Cycle)
}

/// Projection followed by the closure filter when `mode` is `Cycle`.
pub fn postselect(state: Superposition<'_>, mode: FilterMode) -> ProjectionResult<'_> {
    let projected = project_alpha_all_ones(state);
    match mode {
        FilterMode::Path => projected,
        FilterMode::Cycle => apply_closure_filter(projected),
    }
}

fn finish(state: Superposition<'_>, filter_mode: FilterMode) -> ProjectionResult<'_> {
    let d = state.graph().degree() as u32;
    // Over the original d^steps denominator, not reduced.
    let success_probability = if state.is_empty() {
        ExactProbability::new(0, d, state.steps() as u32)
    } else {
        state.norm_squared()
    };
    ProjectionResult {
        survivors: state,
        success_probability,
        filter_mode,
    }
}

/// Draws one survivor with probability proportional to its squared
/// magnitude. Survivors are visited in walk-lexicographic order, so a fixed
/// seed always yields the same walk.
pub fn sample_measurement(result: &ProjectionResult<'_>, seed: u64) -> Result<Vec<Vertex>, MeasurementError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(result, &mut rng)
}

/// As [`sample_measurement`] with a caller-supplied generator.
pub fn sample_with<R: Rng>(result: &ProjectionResult<'_>, rng: &mut R) -> Result<Vec<Vertex>, MeasurementError> {
    let terms: Vec<_> = result.survivors.terms().collect();
    if terms.is_empty() {
        return Err(MeasurementError::NoSurvivors);
    }
    let d = result.survivors.graph().degree() as u128;
    let top = terms.iter().map(|(_, a)| a.halfpow).max().unwrap();
    // Integer weights d^(top - k) are proportional to d^-k.
    let weights: Vec<u128> = terms
        .iter()
        .map(|(_, a)| d.pow(top - a.halfpow))
        .collect();
    let total: u128 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    for ((key, _), w) in terms.into_iter().zip(weights) {
        if pick < w {
            return Ok(key.walk);
        }
        pick -= w;
    }
    unreachable!("pick is below the total weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{run_walk, StepOptions};
    use crate::graph::builtin_graph;

    fn c4_after(steps: usize) -> (crate::graph::Graph, usize) {
        (builtin_graph("c4").unwrap(), steps)
    }

    #[test]
    fn c4_projection() {
        let (g, steps) = c4_after(3);
        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, 1, Some(steps), &opts, |_| {}).unwrap();
        let r = project_alpha_all_ones(run.state);
        assert_eq!(r.filter_mode, FilterMode::Path);
        assert_eq!(r.walks(), vec![vec![1, 2, 3, 4], vec![1, 4, 3, 2]]);
        assert_eq!(r.success_probability, ExactProbability::new(2, 2, 3));
        assert_eq!(r.success_probability.to_string(), "2/2^3");

        let c = apply_closure_filter(r);
        assert_eq!(c.filter_mode, FilterMode::Cycle);
        assert_eq!(c.walks(), vec![vec![1, 2, 3, 4], vec![1, 4, 3, 2]]);
        assert_eq!(c.success_probability.to_string(), "2/2^3");
    }

    #[test]
    fn c4_even_step_projection_is_empty() {
        let (g, steps) = c4_after(2);
        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, 1, Some(steps), &opts, |_| {}).unwrap();
        let r = project_alpha_all_ones(run.state);
        assert_eq!(r.survivor_count(), 0);
        assert!(r.success_probability.is_zero());
        assert_eq!(r.success_probability.to_string(), "0/2^2");
        assert_eq!(sample_measurement(&r, 0), Err(MeasurementError::NoSurvivors));
    }

    #[test]
    fn closure_drops_open_paths_on_cube8() {
        let g = builtin_graph("cube8").unwrap();
        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, 1, None, &opts, |_| {}).unwrap();
        let paths = project_alpha_all_ones(run.state);
        let cycles = apply_closure_filter(paths.clone());
        assert!(cycles.survivor_count() < paths.survivor_count());
        for w in cycles.walks() {
            assert!(g.is_adjacent(*w.last().unwrap(), 1));
        }
        assert!(paths.walks().iter().any(|w| !g.is_adjacent(*w.last().unwrap(), 1)));
    }

    #[test]
    fn sampling_is_seeded() {
        let (g, steps) = c4_after(3);
        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, 1, Some(steps), &opts, |_| {}).unwrap();
        let r = postselect(run.state, FilterMode::Cycle);
        let a = sample_measurement(&r, 7).unwrap();
        assert_eq!(a, sample_measurement(&r, 7).unwrap());
        assert!(a == vec![1, 2, 3, 4] || a == vec![1, 4, 3, 2]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("path".parse::<FilterMode>(), Ok(FilterMode::Path));
        assert_eq!("cycle".parse::<FilterMode>(), Ok(FilterMode::Cycle));
        assert!("loop".parse::<FilterMode>().is_err());
    }
}
