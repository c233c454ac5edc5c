//! End-to-end runs and the records they produce.
//!
//! Every record serialises to a single JSON object whose keys appear in a
//! fixed order. Records carry no timing data unless asked to, so the same
//! configuration always yields byte-identical output.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::evolution::{gate_count, run_walk, EvolutionError, StepOptions, StepStats};
use crate::graph::{builtin_graph, parse_graph, Graph, GraphError, Vertex};
use crate::oracle::{compare_with_quantum, enumerate_hamiltonian, CompareReport, OracleError};
use crate::postselect::{postselect, sample_measurement, FilterMode};
use crate::probability::ExactProbability;
use crate::signing::{build_flip_unitary, SigningError};
use crate::state::StateError;

/// Default term cap, `2^25`.
pub const DEFAULT_MAX_TERMS: usize = 1 << 25;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const SYNTAX: i32 = 2;
    pub const NO_SURVIVORS: i32 = 3;
    pub const RESOURCE_CAP: i32 = 4;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSource {
    Builtin(String),
    File(PathBuf),
}

impl GraphSource {
    pub fn label(&self) -> String {
        match self {
            GraphSource::Builtin(name) => format!("builtin:{name}"),
            GraphSource::File(path) => path.display().to_string(),
        }
    }

    pub fn load(&self) -> Result<Graph, PipelineError> {
        match self {
            GraphSource::Builtin(name) => Ok(builtin_graph(name)?),
            GraphSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                Ok(parse_graph(&text)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Structured,
}

/// A run configuration. `steps: None` means `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub source: GraphSource,
    pub start: Vertex,
    pub steps: Option<usize>,
    pub mode: FilterMode,
    pub prune: bool,
    pub seed: u64,
    pub max_terms: usize,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn builtin(name: &str) -> Self {
        RunConfig {
            source: GraphSource::Builtin(name.to_string()),
            start: 1,
            steps: None,
            mode: FilterMode::Cycle,
            prune: false,
            seed: 0,
            max_terms: DEFAULT_MAX_TERMS,
            format: OutputFormat::Structured,
        }
    }
}

/// [`RunConfig`] with defaults filled in, echoed into every record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedConfig {
    pub source: GraphSource,
    pub start: Vertex,
    pub steps: usize,
    pub mode: FilterMode,
    pub prune: bool,
    pub seed: u64,
    pub max_terms: usize,
    pub format: OutputFormat,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Signing(#[from] SigningError),
    #[error(transparent)]
    State(#[from] StateError),
}

impl PipelineError {
    /// Validation failures map to 1, the term cap to 4, and every other
    /// input problem (syntax, unreadable file, bad name or parameter) to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Graph(GraphError::Validation(_)) => exit::VALIDATION,
            PipelineError::Evolution(EvolutionError::TermLimit { .. })
            | PipelineError::Oracle(OracleError::Evolution(EvolutionError::TermLimit { .. })) => {
                exit::RESOURCE_CAP
            }
            _ => exit::SYNTAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbabilityRecord {
    pub num: u128,
    pub den_base: u32,
    pub den_exp: u32,
    pub decimal: String,
}

impl From<&ExactProbability> for ProbabilityRecord {
    fn from(p: &ExactProbability) -> Self {
        ProbabilityRecord {
            num: p.numerator(),
            den_base: p.base(),
            den_exp: p.exponent(),
            decimal: p.decimal(),
        }
    }
}

/// Result of one full run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub graph: String,
    pub graph_hash: String,
    pub n: usize,
    pub d: usize,
    pub start: Vertex,
    pub steps: usize,
    pub filter_mode: FilterMode,
    pub survivor_count: usize,
    pub success_probability: ProbabilityRecord,
    pub sampled_walk: Option<Vec<Vertex>>,
    pub rng_seed: u64,
    pub gate_count: usize,
    pub step_terms: Vec<usize>,
    pub step_pruned: Vec<usize>,
    pub config: ResolvedConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records always serialise")
    }
}

/// Extra outputs of [`run`] that are not part of the record.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunExtras {
    /// Keep the debug dump of the state before projection.
    pub dump: bool,
    /// Include `wall_ms` in the record.
    pub timings: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub dump: Option<String>,
    pub exact_probability: ExactProbability,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.record.sampled_walk.is_some() {
            exit::SUCCESS
        } else {
            exit::NO_SURVIVORS
        }
    }
}

/// Loads the graph, resolves defaults and fails early on bad parameters.
pub fn resolve(config: &RunConfig) -> Result<(Graph, ResolvedConfig), PipelineError> {
    let graph = config.source.load()?;
    if !graph.contains(config.start) {
        return Err(StateError::VertexOutOfRange {
            vertex: config.start,
            n: graph.n(),
        }
        .into());
    }
    let max = graph.n() - 1;
    let steps = config.steps.unwrap_or(max);
    if steps > max {
        return Err(EvolutionError::StepLimitExceeded { requested: steps, max }.into());
    }
    let resolved = ResolvedConfig {
        source: config.source.clone(),
        start: config.start,
        steps,
        mode: config.mode,
        prune: config.prune,
        seed: config.seed,
        max_terms: config.max_terms,
        format: config.format,
    };
    Ok((graph, resolved))
}

/// Walk, project, filter and sample.
pub fn run(
    config: &RunConfig,
    extras: RunExtras,
    on_step: impl FnMut(&StepStats),
) -> Result<RunOutcome, PipelineError> {
    let started = Instant::now();
    let (graph, resolved) = resolve(config)?;
    let opts = StepOptions::new(build_flip_unitary(graph.degree())?)
        .pruned(resolved.prune)
        .with_max_terms(resolved.max_terms);
    let walk = run_walk(&graph, resolved.start, Some(resolved.steps), &opts, on_step)?;
    let dump = extras.dump.then(|| walk.state.dump());
    let result = postselect(walk.state, resolved.mode);
    let sampled_walk = sample_measurement(&result, resolved.seed).ok();

    let record = RunRecord {
        graph: resolved.source.label(),
        graph_hash: graph.content_hash(),
        n: graph.n(),
        d: graph.degree(),
        start: resolved.start,
        steps: resolved.steps,
        filter_mode: resolved.mode,
        survivor_count: result.survivor_count(),
        success_probability: (&result.success_probability).into(),
        sampled_walk,
        rng_seed: resolved.seed,
        gate_count: gate_count(&graph, resolved.steps),
        step_terms: std::iter::once(1)
            .chain(walk.telemetry.iter().map(|s| s.terms))
            .collect(),
        step_pruned: walk.telemetry.iter().map(|s| s.pruned).collect(),
        wall_ms: extras.timings.then(|| started.elapsed().as_millis() as u64),
        config: resolved,
    };
    Ok(RunOutcome {
        record,
        dump,
        exact_probability: result.success_probability,
    })
}

/// Gate count and per-step growth without projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsRecord {
    pub graph: String,
    pub graph_hash: String,
    pub n: usize,
    pub d: usize,
    pub start: Vertex,
    pub steps: usize,
    pub prune: bool,
    pub gate_count: usize,
    pub gate_bound: usize,
    pub step_terms: Vec<usize>,
    pub step_pruned: Vec<usize>,
}

pub fn stats(config: &RunConfig, on_step: impl FnMut(&StepStats)) -> Result<StatsRecord, PipelineError> {
    let (graph, resolved) = resolve(config)?;
    let opts = StepOptions::new(build_flip_unitary(graph.degree())?)
        .pruned(resolved.prune)
        .with_max_terms(resolved.max_terms);
    let walk = run_walk(&graph, resolved.start, Some(resolved.steps), &opts, on_step)?;
    Ok(StatsRecord {
        graph: resolved.source.label(),
        graph_hash: graph.content_hash(),
        n: graph.n(),
        d: graph.degree(),
        start: resolved.start,
        steps: resolved.steps,
        prune: resolved.prune,
        gate_count: gate_count(&graph, resolved.steps),
        gate_bound: graph.n() * graph.n(),
        step_terms: std::iter::once(1)
            .chain(walk.telemetry.iter().map(|s| s.terms))
            .collect(),
        step_pruned: walk.telemetry.iter().map(|s| s.pruned).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    pub graph: String,
    pub graph_hash: String,
    pub n: usize,
    pub d: usize,
    pub start: Vertex,
    pub ham_path_count: usize,
    pub ham_cycle_count: usize,
    pub undirected_cycle_count: usize,
    pub ham_paths: Vec<Vec<Vertex>>,
    pub ham_cycles: Vec<Vec<Vertex>>,
    pub walk_counts: Vec<u128>,
}

pub fn oracle(source: &GraphSource, start: Vertex) -> Result<OracleRecord, PipelineError> {
    let graph = source.load()?;
    let result = enumerate_hamiltonian(&graph, start)?;
    Ok(OracleRecord {
        graph: source.label(),
        graph_hash: graph.content_hash(),
        n: graph.n(),
        d: graph.degree(),
        start,
        ham_path_count: result.ham_paths.len(),
        ham_cycle_count: result.ham_cycles.len(),
        undirected_cycle_count: result.undirected_cycle_count(),
        ham_paths: result.ham_paths,
        ham_cycles: result.ham_cycles,
        walk_counts: result.walk_counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareRecord {
    pub graph: String,
    pub graph_hash: String,
    pub n: usize,
    pub d: usize,
    pub start: Vertex,
    pub prune: bool,
    #[serde(rename = "match")]
    pub matches: bool,
    #[serde(flatten)]
    pub report: CompareReport,
}

pub fn compare(config: &RunConfig) -> Result<CompareRecord, PipelineError> {
    let (graph, resolved) = resolve(config)?;
    let signing = build_flip_unitary(graph.degree())?;
    let report = compare_with_quantum(&graph, resolved.start, resolved.mode, signing.matrix(), resolved.prune)?;
    Ok(CompareRecord {
        graph: resolved.source.label(),
        graph_hash: graph.content_hash(),
        n: graph.n(),
        d: graph.degree(),
        start: resolved.start,
        prune: resolved.prune,
        matches: report.matches(),
        report,
    })
}

/// Serialises any record as one line of JSON.
pub fn to_json_line<T: Serialize>(record: &T) -> String {
    serde_json::to_string(record).expect("records always serialise")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_run_record() {
        let mut config = RunConfig::builtin("c4");
        config.seed = 7;
        let out = run(&config, RunExtras::default(), |_| {}).unwrap();
        let r = &out.record;
        assert_eq!((r.n, r.d, r.steps, r.survivor_count), (4, 2, 3, 2));
        assert_eq!(r.success_probability.num, 2);
        assert_eq!((r.success_probability.den_base, r.success_probability.den_exp), (2, 3));
        assert_eq!(r.step_terms, vec![1, 2, 4, 8]);
        assert_eq!(r.gate_count, 5);
        let walk = r.sampled_walk.clone().unwrap();
        assert!(walk == vec![1, 2, 3, 4] || walk == vec![1, 4, 3, 2]);
        assert_eq!(out.exit_code(), exit::SUCCESS);
        assert!(r.wall_ms.is_none());

        let json = r.to_json();
        assert!(json.starts_with(r#"{"graph":"builtin:c4","graph_hash":""#), "{json}");
        assert!(json.contains(r#""success_probability":{"num":2,"den_base":2,"den_exp":3,"decimal":"0.250000000000"}"#));
        assert!(!json.contains('\n'));
    }

    #[test]
    fn no_survivors_exit() {
        let mut config = RunConfig::builtin("c4");
        config.steps = Some(2);
        let out = run(&config, RunExtras::default(), |_| {}).unwrap();
        assert_eq!(out.record.sampled_walk, None);
        assert!(out.exact_probability.is_zero());
        assert_eq!(out.exit_code(), exit::NO_SURVIVORS);
    }

    #[test]
    fn error_exit_codes() {
        let mut config = RunConfig::builtin("cube8");
        config.max_terms = 10;
        assert_eq!(run(&config, RunExtras::default(), |_| {}).unwrap_err().exit_code(), exit::RESOURCE_CAP);

        let bad_start = RunConfig { start: 9, ..RunConfig::builtin("cube8") };
        assert_eq!(run(&bad_start, RunExtras::default(), |_| {}).unwrap_err().exit_code(), exit::SYNTAX);

        let too_many = RunConfig { steps: Some(8), ..RunConfig::builtin("cube8") };
        assert_eq!(run(&too_many, RunExtras::default(), |_| {}).unwrap_err().exit_code(), exit::SYNTAX);

        let unknown = RunConfig::builtin("petersen");
        assert_eq!(run(&unknown, RunExtras::default(), |_| {}).unwrap_err().exit_code(), exit::SYNTAX);

        let invalid = PipelineError::Graph(GraphError::Validation(vec![]));
        assert_eq!(invalid.exit_code(), exit::VALIDATION);
    }

    #[test]
    fn stats_cube8() {
        let s = stats(&RunConfig::builtin("cube8"), |_| {}).unwrap();
        assert_eq!(s.gate_count, 25);
        assert_eq!(s.step_terms, vec![1, 3, 9, 27, 81, 243, 729, 2187]);
        assert!(s.gate_count <= s.gate_bound);
    }

    #[test]
    fn compare_k33() {
        let c = compare(&RunConfig::builtin("k33")).unwrap();
        assert!(c.matches);
        assert_eq!(c.report.oracle_count, 12);
        let json = to_json_line(&c);
        assert!(json.contains(r#""match":true"#));
    }

    #[test]
    fn oracle_record() {
        let o = oracle(&GraphSource::Builtin("k33".into()), 1).unwrap();
        assert_eq!(o.ham_cycle_count, 12);
        assert_eq!(o.undirected_cycle_count, 6);
        assert_eq!(o.walk_counts, vec![1, 3, 9, 27, 81, 243]);
    }
}
