use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use flexdo::{
    one_climb_compliant, parse_dag_file, presets, simulate, trace_to_csv, validate, CpuCount,
    Dist, Environment, GenParams,
};
use flexdo_cli::{
    corpus_stats, load_corpus, one_climb_census, render_census_csv, render_histograms_csv,
    render_stats_csv, run_experiment, write_generated_corpus, CorpusSource, ExperimentConfig,
    ScenarioAxis, SolverKind,
};

#[derive(Parser)]
#[command(
    name = "flexdo",
    about = "Simulate and solve mobile-to-edge offloading of DAG applications",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GenArgs {
    /// Smallest number of offloadable tasks.
    #[arg(long, default_value_t = 18)]
    min_tasks: usize,
    /// Largest number of offloadable tasks.
    #[arg(long, default_value_t = 28)]
    max_tasks: usize,
    /// Largest number of tasks per layer.
    #[arg(long, default_value_t = 5)]
    max_width: usize,
    /// Probability of an extra forward edge per cross-layer pair.
    #[arg(long, default_value_t = 0.1)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn params(&self) -> GenParams {
        GenParams {
            n_tasks: (self.min_tasks, self.max_tasks),
            max_layer_width: self.max_width,
            extra_edge_prob: self.edge_prob,
            work_ops: Dist::LogUniform { lo: 8e10, hi: 1.6e12 },
            mem_bytes: Dist::LogUniform { lo: 2e6, hi: 2e8 },
            seed: self.seed,
        }
    }
}

#[derive(Args, Clone)]
struct EnvArgs {
    /// Mobile CPU count (integer or `inf`).
    #[arg(long)]
    mobile_cpus: Option<CpuCount>,
    /// Edge-server CPU count (integer or `inf`).
    #[arg(long)]
    edge_cpus: Option<CpuCount>,
    /// Channel rate in Mbps.
    #[arg(long)]
    rate_mbps: Option<f64>,
    /// Hardware profile file; defaults to the built-in presets.
    #[arg(long)]
    profile: Option<PathBuf>,
}

impl EnvArgs {
    fn environment(&self) -> Result<Environment> {
        let mut env = match &self.profile {
            Some(path) => {
                let bytes = std::fs::read(path)
                    .with_context(|| format!("reading profile {}", path.display()))?;
                flexdo::parse_profile(&bytes)?
            }
            None => presets::default_environment(),
        };
        if let Some(c) = self.mobile_cpus {
            env.mobile.cpus = c;
        }
        if let Some(c) = self.edge_cpus {
            env.edge.cpus = c;
        }
        if let Some(r) = self.rate_mbps {
            env.channel_rate = flexdo::env::mbps_to_bytes_per_sec(r);
        }
        Ok(env)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of synthetic DAG documents.
    Generate {
        /// Output directory for the DAG files.
        #[arg(long)]
        out: PathBuf,
        /// Number of DAGs to generate.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Solve one DAG with one solver and print the decision and makespan.
    Solve {
        /// DAG document to solve.
        #[arg(long)]
        dag: PathBuf,
        /// Solver: no-offloading, full-offloading, flexdo-n, flexdo-n2,
        /// flexdo-<s_II>, or exhaustive.
        #[arg(long)]
        solver: SolverKind,
        /// Explicit s_II override for the flexdo solver.
        #[arg(long)]
        sii: Option<usize>,
        /// Offloadable-task cap for the exhaustive solver.
        #[arg(long, default_value_t = flexdo::DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        /// Write the chosen decision's event trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Sweep a corpus across a scenario axis and write result CSVs.
    Experiment {
        /// Directory of DAG documents.
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for results.csv, aggregate.csv, decisions CSV.
        #[arg(long)]
        out: PathBuf,
        /// Scenario axis: mobile-cpus, edge-cpus, or rate-mbps.
        #[arg(long)]
        scenario: String,
        /// Comma-separated solvers to run.
        #[arg(long, value_delimiter = ',', required = true)]
        solvers: Vec<SolverKind>,
        /// Override the swept mobile CPU counts (integers or `inf`).
        #[arg(long, value_delimiter = ',')]
        mobile_cpus: Option<Vec<CpuCount>>,
        /// Override the swept edge CPU counts.
        #[arg(long, value_delimiter = ',')]
        edge_cpus: Option<Vec<u32>>,
        /// Override the swept channel rates in Mbps.
        #[arg(long, value_delimiter = ',')]
        rate_mbps: Option<Vec<f64>>,
        /// Offloadable-task cap for the exhaustive solver.
        #[arg(long, default_value_t = flexdo::DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        /// Record wall-clock solve times (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Report per-DAG structure and histograms for a corpus.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for per_dag.csv and histograms.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of DAGs whose exhaustive optimum violates the one-climb
    /// policy.
    Census {
        #[arg(long)]
        corpus: PathBuf,
        /// Optional CSV report of per-DAG optimal decisions.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = flexdo::DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        #[command(flatten)]
        env: EnvArgs,
    },
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { out, count, gen } => {
            let files = write_generated_corpus(&out, &gen.params(), count)?;
            println!("wrote {} DAGs to {}", files.len(), out.display());
        }
        Command::Solve { dag, solver, sii, cap, trace, env } => {
            let bytes =
                std::fs::read(&dag).with_context(|| format!("reading {}", dag.display()))?;
            let app = parse_dag_file(&bytes)?;
            let environment = env.environment()?;
            let solver = match (solver, sii) {
                (SolverKind::Exhaustive, Some(_)) => bail!("--sii only applies to flexdo solvers"),
                (s, None) => s,
                (SolverKind::NoOffloading | SolverKind::FullOffloading, Some(_)) => {
                    bail!("--sii only applies to flexdo solvers")
                }
                (_, Some(k)) => SolverKind::FlexdoSii(k),
            };
            let outcome = solver.run(&app, &environment, cap)?;
            let compliant = one_climb_compliant(&app, &outcome.decision)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let offloaded: Vec<usize> = (0..app.tasks.len())
                .filter(|&i| outcome.decision.is_offloaded(i))
                .collect();
            println!("dag: {} ({} offloadable tasks)", dag.display(), app.n_offloadable());
            println!("solver: {}", solver.name());
            println!("decision: {}", outcome.decision.bitstring());
            println!("offloaded: {offloaded:?}");
            println!("makespan_s: {:.9}", outcome.makespan);
            println!("candidates: {}", outcome.candidates_evaluated);
            println!("one_climb_compliant: {compliant}");
            if let Some(path) = trace {
                let result = simulate(&app, &environment, &outcome.decision)?;
                std::fs::write(&path, trace_to_csv(&result))?;
                println!("trace: {}", path.display());
            }
        }
        Command::Experiment {
            corpus,
            out,
            scenario,
            solvers,
            mobile_cpus,
            edge_cpus,
            rate_mbps,
            cap,
            timings,
        } => {
            let scenario = match scenario.as_str() {
                "mobile-cpus" => mobile_cpus
                    .map(ScenarioAxis::MobileCpus)
                    .unwrap_or_else(ScenarioAxis::default_mobile_cpus),
                "edge-cpus" => edge_cpus
                    .map(ScenarioAxis::EdgeCpus)
                    .unwrap_or_else(ScenarioAxis::default_edge_cpus),
                "rate-mbps" => rate_mbps
                    .map(ScenarioAxis::RateMbps)
                    .unwrap_or_else(ScenarioAxis::default_rate_mbps),
                other => bail!("unknown scenario {other:?}: expected mobile-cpus, edge-cpus, or rate-mbps"),
            };
            let cfg = ExperimentConfig {
                corpus: CorpusSource::Dir(corpus),
                scenario,
                solvers,
                cap,
                out_dir: out,
                timings,
            };
            let summary = run_experiment(&cfg)?;
            println!(
                "{} rows over {} scenario points ({} corpus entries skipped)",
                summary.rows.len(),
                cfg.scenario.points().len(),
                summary.skipped
            );
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Stats { corpus, out } => {
            let dags = loaded_dags(&corpus)?;
            let rows = corpus_stats(&dags)?;
            std::fs::create_dir_all(&out)?;
            let per_dag = out.join("per_dag.csv");
            let histograms = out.join("histograms.csv");
            std::fs::write(&per_dag, render_stats_csv(&rows))?;
            std::fs::write(&histograms, render_histograms_csv(&rows))?;
            println!("wrote {}", per_dag.display());
            println!("wrote {}", histograms.display());
        }
        Command::Census { corpus, out, cap, env } => {
            let dags = loaded_dags(&corpus)?;
            let environment = env.environment()?;
            let report = one_climb_census(&dags, &environment, cap)?;
            println!(
                "{} of {} optimal decisions violate the one-climb policy ({:.1}%)",
                report.violating_ids.len(),
                report.total,
                100.0 * report.violating_fraction()
            );
            for id in &report.violating_ids {
                println!("violating: {id}");
            }
            if let Some(path) = out {
                std::fs::write(&path, render_census_csv(&report))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

/// Loads a corpus directory, failing on the first unreadable entry (the
/// sweep command skips instead; the inspection commands want everything).
fn loaded_dags(corpus: &PathBuf) -> Result<Vec<(String, flexdo::DagApp)>> {
    let entries = load_corpus(&CorpusSource::Dir(corpus.clone()))?;
    entries
        .into_iter()
        .map(|e| match e.dag {
            Ok(dag) => {
                debug_assert!(validate(&dag).is_valid());
                Ok((e.id, dag))
            }
            Err(reason) => bail!("corpus entry {}: {reason}", e.id),
        })
        .collect()
}
