use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hamwalk::graph::{builtin_graph, parse_raw, random_regular_bipartite, validate_graph, GraphError};
use hamwalk::pipeline::{
    self, exit, to_json_line, GraphSource, OutputFormat, PipelineError, RunConfig, RunExtras,
    DEFAULT_MAX_TERMS,
};
use hamwalk::signing::{build_flip_unitary, printed_matrix, search_signings, verify_flip_unitary};
use hamwalk::{FilterMode, Vertex};

/// Simulate the walk-superposition Hamiltonian cycle algorithm and check it
/// against classical enumeration.
#[derive(Parser)]
#[command(name = "hamwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a graph is simple, regular, bipartite and connected
    Validate(SourceArgs),
    /// Evolve, project, filter and sample one measurement
    Run(RunArgs),
    /// Enumerate Hamiltonian paths and cycles classically
    Oracle(OracleArgs),
    /// Compare simulated survivors with the classical enumeration
    Compare(CompareArgs),
    /// Print the step operator and audit sign patterns
    Signing(SigningArgs),
    /// Gate count and per-step term growth
    Stats(StatsArgs),
    /// Print a random regular bipartite graph in graph-file format
    Generate(GenerateArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Graph file path
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Built-in graph: c4, k33, cube8, prism<N>, heawood, moebius_kantor
    #[arg(long)]
    builtin: Option<String>,
}

impl SourceArgs {
    fn source(&self) -> GraphSource {
        match (&self.graph, &self.builtin) {
            (Some(path), _) => GraphSource::File(path.clone()),
            (None, Some(name)) => GraphSource::Builtin(name.clone()),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Path,
    Cycle,
}

impl From<Mode> for FilterMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Path => FilterMode::Path,
            Mode::Cycle => FilterMode::Cycle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Structured,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Human => OutputFormat::Human,
            Format::Structured => OutputFormat::Structured,
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    start: Vertex,
    /// Number of steps; defaults to n - 1
    #[arg(long)]
    steps: Option<usize>,
    /// Drop branches that can no longer reach the all-ones register
    #[arg(long)]
    prune: bool,
    /// Abort if a step would hold more terms than this
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, value_enum, default_value = "cycle")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the full pre-projection superposition
    #[arg(long)]
    dump: bool,
    /// Add wall-clock time to the record (breaks byte-for-byte reproducibility)
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    start: Vertex,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    start: Vertex,
    #[arg(long, value_enum, default_value = "cycle")]
    mode: Mode,
    #[arg(long)]
    prune: bool,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct SigningArgs {
    /// Degree (number of qubits the operator acts on)
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Audit the 3-qubit printed sign pattern
    #[arg(long, visible_alias = "check-paper")]
    check_printed: bool,
    /// List every valid signing (d <= 3)
    #[arg(long)]
    search: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    walk: WalkArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Vertices per colour class
    #[arg(long)]
    half: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Signing(args) => cmd_signing(&args),
        Command::Stats(args) => cmd_stats(&args),
        Command::Generate(args) => cmd_generate(&args),
    };
    ExitCode::from(code as u8)
}

fn fail(err: &PipelineError) -> i32 {
    eprintln!("error: {err}");
    err.exit_code()
}

fn cmd_validate(args: &SourceArgs) -> i32 {
    let adjacency = match args.source() {
        GraphSource::Builtin(name) => match builtin_graph(&name) {
            Ok(g) => (1..=g.n() as Vertex).map(|v| g.neighbors(v).to_vec()).collect(),
            Err(GraphError::Validation(violations)) => return report_violations(&violations),
            Err(e) => return fail(&e.into()),
        },
        GraphSource::File(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    return fail(&PipelineError::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })
                }
            };
            match parse_raw(&text) {
                Ok(raw) => raw.adjacency(),
                Err(e) => return fail(&e.into()),
            }
        }
    };
    report_violations(&validate_graph(&adjacency))
}

fn report_violations(violations: &[hamwalk::graph::Violation]) -> i32 {
    if violations.is_empty() {
        println!("ok");
        return exit::SUCCESS;
    }
    for v in violations {
        println!("{v}");
    }
    exit::VALIDATION
}

fn walk_config(walk: &WalkArgs, mode: FilterMode, seed: u64) -> RunConfig {
    RunConfig {
        source: walk.source.source(),
        start: walk.start,
        steps: walk.steps,
        mode,
        prune: walk.prune,
        seed,
        max_terms: walk.max_terms,
        format: walk.format.into(),
    }
}

fn print_stats_line(stats: &hamwalk::StepStats) {
    eprintln!("{stats}");
}

fn cmd_run(args: &RunArgs) -> i32 {
    let config = walk_config(&args.walk, args.mode.into(), args.seed);
    let extras = RunExtras {
        dump: args.dump,
        timings: args.timings,
    };
    let outcome = match pipeline::run(&config, extras, print_stats_line) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Some(dump) = &outcome.dump {
        print!("{dump}");
    }
    let r = &outcome.record;
    match config.format {
        OutputFormat::Structured => println!("{}", r.to_json()),
        OutputFormat::Human => {
            println!("graph:        {} ({})", r.graph, r.graph_hash);
            println!("n={} d={} start={} steps={} mode={} prune={}", r.n, r.d, r.start, r.steps, r.filter_mode, r.config.prune);
            println!("survivors:    {}", r.survivor_count);
            println!("probability:  {} = {}", outcome.exact_probability, r.success_probability.decimal);
            match &r.sampled_walk {
                Some(w) => println!("measured:     {}", join(w)),
                None => println!("measured:     no survivors"),
            }
            println!("gate count:   {}", r.gate_count);
            println!("step terms:   {}", join(&r.step_terms));
            if let Some(ms) = r.wall_ms {
                println!("wall time:    {ms} ms");
            }
        }
    }
    outcome.exit_code()
}

fn cmd_oracle(args: &OracleArgs) -> i32 {
    let record = match pipeline::oracle(&args.source.source(), args.start) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match args.format {
        Format::Structured => println!("{}", to_json_line(&record)),
        Format::Human => {
            println!("graph:        {} ({})", record.graph, record.graph_hash);
            println!("n={} d={} start={}", record.n, record.d, record.start);
            println!("paths:        {}", record.ham_path_count);
            for p in &record.ham_paths {
                println!("  {}", join(p));
            }
            println!(
                "cycles:       {} directed, {} undirected",
                record.ham_cycle_count, record.undirected_cycle_count
            );
            for c in &record.ham_cycles {
                println!("  {}", join(c));
            }
            println!("walk counts:  {}", join(&record.walk_counts));
        }
    }
    exit::SUCCESS
}

fn cmd_compare(args: &CompareArgs) -> i32 {
    let config = RunConfig {
        source: args.source.source(),
        start: args.start,
        steps: None,
        mode: args.mode.into(),
        prune: args.prune,
        seed: 0,
        max_terms: DEFAULT_MAX_TERMS,
        format: args.format.into(),
    };
    let record = match pipeline::compare(&config) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match args.format {
        Format::Structured => println!("{}", to_json_line(&record)),
        Format::Human => {
            println!("graph:        {} ({})", record.graph, record.graph_hash);
            println!("mode={} start={} prune={}", record.report.mode, record.start, record.prune);
            println!("quantum:      {}", record.report.quantum_count);
            println!("oracle:       {}", record.report.oracle_count);
            println!("match:        {}", record.matches);
            for w in &record.report.missing {
                println!("  missing {}", join(w));
            }
            for w in &record.report.extra {
                println!("  extra   {}", join(w));
            }
        }
    }
    if record.matches {
        exit::SUCCESS
    } else {
        exit::VALIDATION
    }
}

fn cmd_signing(args: &SigningArgs) -> i32 {
    let v = match build_flip_unitary(args.d) {
        Ok(v) => v,
        Err(e) => return fail(&e.into()),
    };
    print!("{v}");
    let report = verify_flip_unitary(v.matrix(), args.d).expect("built matrix has the right size");
    println!("check: {report}");
    let mut code = exit::SUCCESS;
    if args.check_printed {
        let report = verify_flip_unitary(&printed_matrix(), 3).expect("fixture is 8x8");
        println!("printed 3-qubit pattern: {report}");
        if let Some(v) = report.unitarity_violation {
            println!(
                "erratum: rows {} and {} have dot product {} (must be 0)",
                v.rows.0, v.rows.1, v.dot
            );
        }
    }
    if args.search {
        match search_signings(args.d) {
            Ok(found) => {
                println!("valid signings: {}", found.len());
                for m in found {
                    let rows: Vec<String> = m
                        .rows()
                        .map(|r| r.iter().map(|e| format!("{e:>2}")).collect::<Vec<_>>().join(" "))
                        .collect();
                    println!("  [{}]", rows.join(" | "));
                }
            }
            Err(e) => code = fail(&e.into()),
        }
    }
    code
}

fn cmd_stats(args: &StatsArgs) -> i32 {
    let config = walk_config(&args.walk, FilterMode::Path, 0);
    let record = match pipeline::stats(&config, print_stats_line) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match config.format {
        OutputFormat::Structured => println!("{}", to_json_line(&record)),
        OutputFormat::Human => {
            println!("graph:        {} ({})", record.graph, record.graph_hash);
            println!("n={} d={} start={} steps={} prune={}", record.n, record.d, record.start, record.steps, record.prune);
            println!("gate_count={} (bound n^2 = {})", record.gate_count, record.gate_bound);
            println!("step terms:   {}", join(&record.step_terms));
            println!("step pruned:  {}", join(&record.step_pruned));
        }
    }
    exit::SUCCESS
}

fn cmd_generate(args: &GenerateArgs) -> i32 {
    match random_regular_bipartite(args.half, args.d, args.seed) {
        Ok(g) => {
            println!("# random {}-regular bipartite, half={} seed={}", args.d, args.half, args.seed);
            print!("{}", g.to_text());
            exit::SUCCESS
        }
        Err(e) => fail(&e.into()),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
