use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use edgeswitch::bench::{run_bench, superstep_records};
use edgeswitch::generate::{gen_gnp, gen_pld};
use edgeswitch::io::{read_edge_list_file, write_edge_list_file, LoadMode};
use edgeswitch::mixing::{compare_chains, mixing_report, MixingExperiment, ThinningSchedule};
use edgeswitch::parallel::{default_threads, DEFAULT_GRAIN};
use edgeswitch::report::{rounds_histogram, write_csv, write_csv_file};
use edgeswitch::verify::{chi_square_uniformity, enumerate_graphs, sample_distribution, SamplingConfig};
use edgeswitch::{Algorithm, EdgeList, RandomStream, Randomizer, RunConfig, DEFAULT_LAZY_PROBABILITY};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] edgeswitch::Error),
    #[error("{}: {source}", path.display())]
    Load { path: PathBuf, source: edgeswitch::Error },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(edgeswitch::Error::UnknownState) | CliError::Invariant(_) => 3,
            CliError::Core(_) | CliError::Load { .. } => 2,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Degree-preserving randomization of simple undirected graphs.
#[derive(Debug, Parser)]
#[command(name = "edgeswitch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic graph.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Randomize an edge list with one of the chains.
    Randomize(RandomizeArgs),
    /// Compare the autocorrelation mixing of ES-MC and G-ES-MC.
    AnalyzeMixing(MixingArgs),
    /// Sample a tiny degree sequence and test the output for uniformity.
    VerifyUniformity(VerifyArgs),
    /// Time initialization and supersteps.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Master seed; a random one is drawn and printed if absent.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let seed = RandomStream::from_entropy().seed();
            eprintln!("seed: {seed}");
            seed
        })
    }
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long, default_value = "steady-global-es")]
    algo: Algorithm,
    /// Worker threads, at most 254.
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
    /// Lazy-rejection probability of a global switch, in (0, 1).
    #[arg(long, default_value_t = DEFAULT_LAZY_PROBABILITY)]
    pl: f64,
    #[arg(long, default_value_t = 20)]
    supersteps: usize,
    #[command(flatten)]
    seed: SeedArg,
}

impl ChainArgs {
    fn config(&self) -> CliResult<RunConfig> {
        let config = RunConfig {
            threads: self.threads,
            seed: self.seed.resolve(),
            lazy_probability: self.pl,
            grain: DEFAULT_GRAIN,
        };
        config.validate()?;
        if self.algo == Algorithm::EagerEs && self.threads > 1 {
            eprintln!(
                "warning: eager-es with more than one thread is not a faithful ES-MC and its output is not reproducible"
            );
        }
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Erdős–Rényi G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Havel–Hakimi realization of a power-law degree sequence.
    Pld {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.5)]
        gamma: f64,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Args)]
struct RandomizeArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    #[command(flatten)]
    chain: ChainArgs,
    /// Write edges sorted instead of in internal order.
    #[arg(long)]
    sort_output: bool,
    /// Drop loops and duplicate edges while loading.
    #[arg(long)]
    sanitize: bool,
    /// CSV file receiving per-superstep statistics.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MixingArgs {
    /// Chain to analyze; both are compared if absent.
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long, default_value_t = 2000)]
    supersteps: u64,
    /// Comma-separated thinning values.
    #[arg(long, default_value_t = ThinningSchedule::default())]
    schedule: ThinningSchedule,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_LAZY_PROBABILITY)]
    pl: f64,
    /// Track every node pair instead of the initial edges only.
    #[arg(long)]
    track_all: bool,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated degree sequence.
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<u32>,
    #[arg(long, default_value_t = 120_000)]
    samples: usize,
    #[command(flatten)]
    chain: ChainArgs,
    /// Significance level of the chi-square test.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// CSV destination of the histogram.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long)]
    sanitize: bool,
    /// CSV destination of the timings; standard output if absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV destination of the rounds histogram.
    #[arg(long)]
    rounds: Option<PathBuf>,
}

fn load(path: &Path, sanitize: bool) -> CliResult<EdgeList> {
    let mode = if sanitize { LoadMode::Sanitize } else { LoadMode::Strict };
    read_edge_list_file(path, mode).map_err(|source| CliError::Load { path: path.to_owned(), source })
}

fn write_rows<T: serde::Serialize>(path: Option<&Path>, rows: &[T]) -> CliResult {
    match path {
        Some(p) => write_csv_file(p, rows)?,
        None => write_csv(std::io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn describe(g: &EdgeList) -> String {
    format!("n={} m={} max_degree={}", g.node_count(), g.edge_count(), g.max_degree())
}

fn cmd_gen(kind: GenKind) -> CliResult {
    let (graph, out) = match kind {
        GenKind::Gnp { n, p, out, seed } => (gen_gnp(n, p, &mut RandomStream::new(seed.resolve()))?, out),
        GenKind::Pld { n, gamma, out, seed } => (gen_pld(n, gamma, &mut RandomStream::new(seed.resolve()))?, out),
    };
    write_edge_list_file(&out, &graph, false)?;
    println!("{}", describe(&graph));
    Ok(())
}

fn cmd_randomize(args: RandomizeArgs) -> CliResult {
    let config = args.chain.config()?;
    let graph = load(&args.input, args.sanitize)?;
    let degrees = graph.degree_sequence();
    let started = Instant::now();
    let mut chain = Randomizer::new(args.chain.algo, graph, &config)?;
    let mut stats = Vec::with_capacity(args.chain.supersteps);
    for _ in 0..args.chain.supersteps {
        let t = Instant::now();
        let s = chain.superstep();
        stats.push((s, t.elapsed().as_secs_f64()));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let out = chain.graph();
    if out.degree_sequence() != degrees {
        return Err(CliError::Invariant("degree sequence changed".into()));
    }
    if let Some(why) = out.simplicity_violation() {
        return Err(CliError::Invariant(why));
    }
    write_edge_list_file(&args.output, &out, args.sort_output)?;

    let records = superstep_records(&stats);
    for r in &records {
        let rounds = r.rounds.map(|x| format!(" rounds={x}")).unwrap_or_default();
        eprintln!(
            "superstep {}: accepted={} rejected_loop={} rejected_existing={}{} {:.6}s",
            r.superstep, r.accepted, r.rejected_loop, r.rejected_existing, rounds, r.seconds
        );
    }
    if let Some(p) = &args.report {
        write_csv_file(p, &records)?;
    }
    println!("{} algo={} supersteps={} seconds={elapsed:.6}", describe(&out), args.chain.algo, args.chain.supersteps);
    Ok(())
}

fn cmd_analyze_mixing(args: MixingArgs) -> CliResult {
    let experiment = MixingExperiment {
        nodes: args.nodes,
        gamma: args.gamma,
        runs: args.runs,
        supersteps: args.supersteps,
        schedule: args.schedule,
        seed: args.seed.resolve(),
        lazy_probability: args.pl,
        track_all: args.track_all,
    };
    let rows = match args.algo {
        Some(algo) => mixing_report(algo, &experiment)?.rows(),
        None => {
            let (es, global) = compare_chains(&experiment)?;
            es.rows().into_iter().chain(global.rows()).collect()
        }
    };
    write_rows(args.report.as_deref(), &rows)
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let config = args.chain.config()?;
    let space = enumerate_graphs(&args.degrees)?;
    if space.is_empty() {
        return Err(edgeswitch::Error::NotGraphical.into());
    }
    let sampling = SamplingConfig {
        supersteps: args.chain.supersteps,
        samples: args.samples,
        seed: config.seed,
        threads: config.threads,
        lazy_probability: config.lazy_probability,
    };
    let hist = sample_distribution(args.chain.algo, &args.degrees, &space, &sampling)?;
    let test = chi_square_uniformity(&hist, args.alpha)?;
    println!(
        "{} states, {} samples, chi-square {:.4} (dof {}, critical {:.4} at alpha {}): {}",
        space.len(),
        hist.total(),
        test.statistic,
        test.dof,
        test.critical,
        args.alpha,
        if test.passed { "uniform" } else { "NOT uniform" }
    );
    if let Some(p) = &args.histogram {
        write_csv_file(p, &hist.rows(&space))?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let config = args.chain.config()?;
    let graph = load(&args.input, args.sanitize)?;
    let outcome = run_bench(args.chain.algo, &graph, &config, args.chain.supersteps, args.repetitions)?;
    write_rows(args.report.as_deref(), &outcome.rows)?;
    if let Some(p) = &args.rounds {
        write_csv_file(p, &rounds_histogram(&outcome.rounds))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Randomize(args) => cmd_randomize(args),
        Command::AnalyzeMixing(args) => cmd_analyze_mixing(args),
        Command::VerifyUniformity(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(edgeswitch::Error::NotGraphical).exit_code(), 2);
        assert_eq!(CliError::from(edgeswitch::Error::UnknownState).exit_code(), 3);
        assert_eq!(CliError::Invariant("x".into()).exit_code(), 3);
    }

    #[test]
    fn defaults() {
        let cli = Cli::parse_from(["edgeswitch", "randomize", "-i", "a", "-o", "b"]);
        let Command::Randomize(args) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(args.chain.algo, Algorithm::SteadyGlobalEs);
        assert_eq!(args.chain.supersteps, 20);
        assert_eq!(args.chain.pl, DEFAULT_LAZY_PROBABILITY);
    }
}
