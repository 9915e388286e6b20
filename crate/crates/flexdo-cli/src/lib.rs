//! Experiment harness: corpus loading, scenario sweeps over CPU counts and
//! channel rates, CSV reporting, corpus statistics, and the one-climb
//! census. The command-line binary is a thin wrapper over this module.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use flexdo::solvers::SolveOutcome;
use flexdo::{
    exhaustive_optimal_with_cap, flexdo as flexdo_solve, full_offloading, no_offloading,
    one_climb_compliant, parse_dag_file, presets, relative_gap, simulate_makespan, validate,
    CpuCount, DagApp, Environment, FlexdoParams, GenParams, OffloadDecision,
};
use flexdo::env::mbps_to_bytes_per_sec;

/// Where the experiment corpus comes from.
#[derive(Debug, Clone)]
pub enum CorpusSource {
    /// Directory of `*.json` DAG documents.
    Dir(PathBuf),
    /// Freshly generated DAGs: `count` draws seeded `params.seed + i`.
    Generated { params: GenParams, count: usize },
}

/// One corpus entry: either a usable DAG or the reason it was skipped.
pub struct CorpusEntry {
    pub id: String,
    pub dag: Result<DagApp, String>,
}

/// Loads and validates the corpus in a deterministic order.
pub fn load_corpus(source: &CorpusSource) -> Result<Vec<CorpusEntry>> {
    match source {
        CorpusSource::Dir(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .with_context(|| format!("reading corpus directory {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("corpus directory {} contains no .json files", dir.display());
            }
            Ok(paths
                .into_iter()
                .map(|p| {
                    let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    let dag = std::fs::read(&p)
                        .map_err(|e| e.to_string())
                        .and_then(|bytes| parse_dag_file(&bytes).map_err(|e| e.to_string()));
                    CorpusEntry { id, dag }
                })
                .collect())
        }
        CorpusSource::Generated { params, count } => {
            if *count == 0 {
                bail!("generated corpus must contain at least one DAG");
            }
            Ok((0..*count)
                .map(|i| {
                    let p = params.clone().with_seed(params.seed + i as u64);
                    CorpusEntry {
                        id: format!("gen-{i:04}"),
                        dag: flexdo::generate_dag(&p).map_err(|e| e.to_string()),
                    }
                })
                .collect())
        }
    }
}

/// The swept experiment dimension. Each axis fixes the other two dimensions
/// the way the reference scenarios do: the mobile-CPU sweep keeps all 16
/// edge CPUs and a 20 Mbps channel, while the edge-CPU and rate sweeps
/// assume an unlimited mobile device.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioAxis {
    MobileCpus(Vec<CpuCount>),
    EdgeCpus(Vec<u32>),
    RateMbps(Vec<f64>),
}

impl ScenarioAxis {
    pub fn default_mobile_cpus() -> Self {
        ScenarioAxis::MobileCpus(vec![
            CpuCount::Limited(2),
            CpuCount::Limited(4),
            CpuCount::Limited(8),
            CpuCount::Unlimited,
        ])
    }

    pub fn default_edge_cpus() -> Self {
        ScenarioAxis::EdgeCpus(vec![1, 2, 4, 16])
    }

    pub fn default_rate_mbps() -> Self {
        ScenarioAxis::RateMbps(vec![10.0, 20.0, 100.0])
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioAxis::MobileCpus(_) => "mobile-cpus",
            ScenarioAxis::EdgeCpus(_) => "edge-cpus",
            ScenarioAxis::RateMbps(_) => "rate-mbps",
        }
    }

    /// Point labels with the environment each one denotes.
    pub fn points(&self) -> Vec<(String, Environment)> {
        let base = presets::default_environment();
        match self {
            ScenarioAxis::MobileCpus(counts) => counts
                .iter()
                .map(|&c| {
                    let mut env = base;
                    env.mobile.cpus = c;
                    (c.to_string(), env)
                })
                .collect(),
            ScenarioAxis::EdgeCpus(counts) => counts
                .iter()
                .map(|&c| {
                    let mut env = base;
                    env.mobile.cpus = CpuCount::Unlimited;
                    env.edge.cpus = CpuCount::Limited(c);
                    (c.to_string(), env)
                })
                .collect(),
            ScenarioAxis::RateMbps(rates) => rates
                .iter()
                .map(|&r| {
                    let mut env = base;
                    env.mobile.cpus = CpuCount::Unlimited;
                    env.channel_rate = mbps_to_bytes_per_sec(r);
                    (format_num(r), env)
                })
                .collect(),
        }
    }
}

fn format_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// A decision strategy the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    NoOffloading,
    FullOffloading,
    /// FlexDO with `s_II = round(log2 N)`.
    FlexdoN,
    /// FlexDO with `s_II = round(2 log2 N)`.
    FlexdoN2,
    /// FlexDO with an explicit `s_II`; `flexdo-0` is the pure greedy variant.
    FlexdoSii(usize),
    Exhaustive,
}

impl SolverKind {
    pub fn name(&self) -> String {
        match self {
            SolverKind::NoOffloading => "no-offloading".into(),
            SolverKind::FullOffloading => "full-offloading".into(),
            SolverKind::FlexdoN => "flexdo-n".into(),
            SolverKind::FlexdoN2 => "flexdo-n2".into(),
            SolverKind::FlexdoSii(k) => format!("flexdo-{k}"),
            SolverKind::Exhaustive => "exhaustive".into(),
        }
    }

    pub fn run(&self, dag: &DagApp, env: &Environment, cap: usize) -> Result<SolveOutcome> {
        let outcome = match self {
            SolverKind::NoOffloading => baseline_outcome(dag, env, no_offloading(dag))?,
            SolverKind::FullOffloading => baseline_outcome(dag, env, full_offloading(dag))?,
            SolverKind::FlexdoN => flexdo_solve(dag, env, FlexdoParams::log_n(dag.n_offloadable()))?,
            SolverKind::FlexdoN2 => {
                flexdo_solve(dag, env, FlexdoParams::log_n_squared(dag.n_offloadable()))?
            }
            SolverKind::FlexdoSii(k) => flexdo_solve(dag, env, FlexdoParams::new(*k))?,
            SolverKind::Exhaustive => exhaustive_optimal_with_cap(dag, env, cap)?,
        };
        Ok(outcome)
    }
}

fn baseline_outcome(dag: &DagApp, env: &Environment, d: OffloadDecision) -> Result<SolveOutcome> {
    let makespan = simulate_makespan(dag, env, &d)?;
    Ok(SolveOutcome { decision: d, makespan, candidates_evaluated: 1, candidate_set: None })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown solver {0:?}: expected no-offloading, full-offloading, flexdo-n, flexdo-n2, flexdo-<s_II>, or exhaustive")]
pub struct ParseSolverError(String);

impl FromStr for SolverKind {
    type Err = ParseSolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "no-offloading" => Ok(SolverKind::NoOffloading),
            "full-offloading" => Ok(SolverKind::FullOffloading),
            "flexdo-n" | "flexdo-N" => Ok(SolverKind::FlexdoN),
            "flexdo-n2" | "flexdo-N2" | "flexdo-n^2" => Ok(SolverKind::FlexdoN2),
            "exhaustive" => Ok(SolverKind::Exhaustive),
            t => t
                .strip_prefix("flexdo-")
                .and_then(|k| k.parse::<usize>().ok())
                .map(SolverKind::FlexdoSii)
                .ok_or_else(|| ParseSolverError(s.to_string())),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub corpus: CorpusSource,
    pub scenario: ScenarioAxis,
    pub solvers: Vec<SolverKind>,
    pub cap: usize,
    pub out_dir: PathBuf,
    /// Record wall-clock solve times in the per-row CSV. Off by default so
    /// that identical configurations produce byte-identical output files.
    pub timings: bool,
}

/// One (dag, scenario point, solver) measurement.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub dag_id: String,
    pub scenario: &'static str,
    pub point: String,
    pub solver: String,
    pub makespan_s: f64,
    pub gap_pct: Option<f64>,
    pub one_climb: bool,
    pub candidates: usize,
    pub wall_ms: u64,
    pub decision: String,
}

pub struct ExperimentSummary {
    pub rows: Vec<ResultRow>,
    pub skipped: usize,
    pub files: Vec<PathBuf>,
}

/// Runs the full sweep and writes `results.csv`, `aggregate.csv`, and a
/// per-scenario decision audit file into the output directory. The relative
/// gap is reported only when the exhaustive solver is part of the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    if cfg.solvers.is_empty() {
        bail!("at least one solver is required");
    }
    let entries = load_corpus(&cfg.corpus)?;
    let mut dags: Vec<(String, DagApp)> = Vec::new();
    let mut skipped = 0usize;
    for e in entries {
        match e.dag {
            Ok(dag) => dags.push((e.id, dag)),
            Err(reason) => {
                eprintln!("skipping {}: {reason}", e.id);
                skipped += 1;
            }
        }
    }
    if dags.is_empty() {
        bail!("corpus is empty after skipping unreadable entries");
    }
    if cfg.solvers.contains(&SolverKind::Exhaustive) {
        for (id, dag) in &dags {
            let n = dag.n_offloadable();
            if n > cfg.cap {
                bail!("DAG {id} has {n} offloadable tasks, above the exhaustive cap {}", cfg.cap);
            }
        }
    }

    let points = cfg.scenario.points();
    let scenario = cfg.scenario.name();

    // All (dag, point) cells in deterministic order; each yields one row
    // per solver. Cells are independent, so they run in parallel and are
    // reassembled in order.
    let cells: Vec<(usize, usize)> = (0..dags.len())
        .flat_map(|d| (0..points.len()).map(move |p| (d, p)))
        .collect();
    let rows: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(di, pi)| -> Result<Vec<ResultRow>> {
            let (id, dag) = &dags[di];
            let (point, env) = &points[pi];
            let mut opt: Option<SolveOutcome> = None;
            if cfg.solvers.contains(&SolverKind::Exhaustive) {
                opt = Some(SolverKind::Exhaustive.run(dag, env, cfg.cap)?);
            }
            let mut out = Vec::with_capacity(cfg.solvers.len());
            for solver in &cfg.solvers {
                let started = Instant::now();
                let outcome = match (solver, &opt) {
                    (SolverKind::Exhaustive, Some(o)) => o.clone(),
                    _ => solver.run(dag, env, cfg.cap)?,
                };
                let wall_ms = started.elapsed().as_millis() as u64;
                let gap = opt
                    .as_ref()
                    .map(|o| relative_gap(outcome.makespan, o.makespan))
                    .transpose()?;
                out.push(ResultRow {
                    dag_id: id.clone(),
                    scenario,
                    point: point.clone(),
                    solver: solver.name(),
                    makespan_s: outcome.makespan,
                    gap_pct: gap,
                    one_climb: one_climb_compliant(dag, &outcome.decision)
                        .map_err(|e| anyhow::anyhow!("{e}"))?,
                    candidates: outcome.candidates_evaluated,
                    wall_ms: if cfg.timings { wall_ms } else { 0 },
                    decision: outcome.decision.bitstring(),
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ResultRow> = rows.into_iter().flatten().collect();

    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let results_path = cfg.out_dir.join("results.csv");
    let aggregate_path = cfg.out_dir.join("aggregate.csv");
    let decisions_path = cfg.out_dir.join(format!("decisions_{scenario}.csv"));

    std::fs::write(&results_path, render_results_csv(&rows))?;
    std::fs::write(&aggregate_path, render_aggregate_csv(&rows, &points, &cfg.solvers, skipped))?;
    std::fs::write(&decisions_path, render_decisions_csv(&rows))?;

    Ok(ExperimentSummary {
        rows,
        skipped,
        files: vec![results_path, aggregate_path, decisions_path],
    })
}

pub fn render_results_csv(rows: &[ResultRow]) -> String {
    let mut out =
        String::from("dag,scenario,point,solver,makespan_s,gap_pct,one_climb,candidates,wall_ms\n");
    for r in rows {
        let gap = r.gap_pct.map_or(String::new(), |g| format!("{g:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{:.6},{},{},{},{}\n",
            r.dag_id, r.scenario, r.point, r.solver, r.makespan_s, gap, r.one_climb, r.candidates,
            r.wall_ms
        ));
    }
    out
}

fn render_decisions_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("dag,point,solver,placement\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.dag_id, r.point, r.solver, r.decision));
    }
    out
}

fn render_aggregate_csv(
    rows: &[ResultRow],
    points: &[(String, Environment)],
    solvers: &[SolverKind],
    skipped: usize,
) -> String {
    let mut groups: BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let pi = points.iter().position(|(p, _)| *p == r.point).expect("known point");
        let si = solvers.iter().position(|s| s.name() == r.solver).expect("known solver");
        let entry = groups.entry((pi, si)).or_default();
        entry.0.push(r.makespan_s);
        if let Some(g) = r.gap_pct {
            entry.1.push(g);
        }
    }
    let mut out = String::from(
        "scenario,point,solver,n_dags,skipped,makespan_mean_s,makespan_std_s,gap_mean_pct\n",
    );
    let scenario = rows.first().map_or("", |r| r.scenario);
    for ((pi, si), (makespans, gaps)) in groups {
        let n = makespans.len();
        let mean = makespans.iter().sum::<f64>() / n as f64;
        let std = if n >= 2 {
            let var = makespans.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            format!("{:.6}", var.sqrt())
        } else {
            String::new()
        };
        let gap_mean = if gaps.is_empty() {
            String::new()
        } else {
            format!("{:.6}", gaps.iter().sum::<f64>() / gaps.len() as f64)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{},{}\n",
            scenario,
            points[pi].0,
            solvers[si].name(),
            n,
            skipped,
            mean,
            std,
            gap_mean
        ));
    }
    out
}

/// Per-DAG structural statistics. Density counts only the edges between
/// offloadable tasks against the `N(N-1)/2` unordered pairs; anchor edges
/// and the terminals stay out of both numerator and denominator.
#[derive(Debug, Clone)]
pub struct StatsRow {
    pub id: String,
    pub n_offloadable: usize,
    pub edges_total: usize,
    pub edges_offloadable: usize,
    pub density: f64,
}

pub fn corpus_stats(dags: &[(String, DagApp)]) -> Result<Vec<StatsRow>> {
    if dags.is_empty() {
        bail!("empty corpus");
    }
    Ok(dags
        .iter()
        .map(|(id, dag)| {
            let n = dag.n_offloadable();
            let offloadable = dag.edges.iter().filter(|e| !dag.is_anchor_edge(e)).count();
            let pairs = n.saturating_sub(1) * n / 2;
            StatsRow {
                id: id.clone(),
                n_offloadable: n,
                edges_total: dag.edges.len(),
                edges_offloadable: offloadable,
                density: if pairs == 0 { 0.0 } else { offloadable as f64 / pairs as f64 },
            }
        })
        .collect())
}

pub fn render_stats_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from("dag,tasks_offloadable,edges_total,edges_offloadable,density\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6}\n",
            r.id, r.n_offloadable, r.edges_total, r.edges_offloadable, r.density
        ));
    }
    out
}

/// Binned histograms over task counts, edge counts, and densities.
pub fn render_histograms_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from("metric,bin_lo,bin_hi,count\n");

    let mut tasks: BTreeMap<usize, usize> = BTreeMap::new();
    for r in rows {
        *tasks.entry(r.n_offloadable).or_default() += 1;
    }
    for (n, count) in tasks {
        out.push_str(&format!("tasks,{n},{n},{count}\n"));
    }

    let mut edges: BTreeMap<usize, usize> = BTreeMap::new();
    for r in rows {
        *edges.entry(r.edges_offloadable / 5 * 5).or_default() += 1;
    }
    for (lo, count) in edges {
        out.push_str(&format!("edges,{lo},{},{count}\n", lo + 4));
    }

    let mut density = [0usize; 10];
    for r in rows {
        density[((r.density * 10.0) as usize).min(9)] += 1;
    }
    for (i, count) in density.iter().enumerate() {
        out.push_str(&format!(
            "density,{:.1},{:.1},{count}\n",
            i as f64 / 10.0,
            (i + 1) as f64 / 10.0
        ));
    }
    out
}

/// Outcome of running the exhaustive solver over a corpus and checking each
/// optimal decision against the one-climb policy.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub total: usize,
    pub violating_ids: Vec<String>,
    /// Per-DAG optimal placement and compliance flag, corpus order.
    pub decisions: Vec<(String, String, bool)>,
}

impl CensusReport {
    pub fn violating_fraction(&self) -> f64 {
        self.violating_ids.len() as f64 / self.total as f64
    }
}

pub fn one_climb_census(
    dags: &[(String, DagApp)],
    env: &Environment,
    cap: usize,
) -> Result<CensusReport> {
    if dags.is_empty() {
        bail!("empty corpus");
    }
    for (id, dag) in dags {
        let n = dag.n_offloadable();
        if n > cap {
            bail!("DAG {id} has {n} offloadable tasks, above the exhaustive cap {cap}");
        }
    }
    let decisions: Vec<(String, String, bool)> = dags
        .par_iter()
        .map(|(id, dag)| -> Result<(String, String, bool)> {
            let opt = exhaustive_optimal_with_cap(dag, env, cap)?;
            let compliant =
                one_climb_compliant(dag, &opt.decision).map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok((id.clone(), opt.decision.bitstring(), compliant))
        })
        .collect::<Result<_>>()?;
    let violating_ids = decisions
        .iter()
        .filter(|(_, _, compliant)| !compliant)
        .map(|(id, _, _)| id.clone())
        .collect();
    Ok(CensusReport { total: dags.len(), violating_ids, decisions })
}

pub fn render_census_csv(report: &CensusReport) -> String {
    let mut out = String::from("dag,optimal_placement,one_climb_compliant\n");
    for (id, placement, compliant) in &report.decisions {
        out.push_str(&format!("{id},{placement},{compliant}\n"));
    }
    out
}

/// Writes a generated corpus to `dir`, one JSON document per DAG.
pub fn write_generated_corpus(dir: &Path, params: &GenParams, count: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let p = params.clone().with_seed(params.seed + i as u64);
        let dag = flexdo::generate_dag(&p)?;
        debug_assert!(validate(&dag).is_valid());
        let path = dir.join(format!("dag_{i:04}.json"));
        std::fs::write(&path, flexdo::write_dag_file(&dag))?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flexdo::{Edge, Task};

    fn heavy_chain() -> DagApp {
        // Offloading anything drags a giant transfer, so No Offloading is
        // optimal at every rate point.
        DagApp {
            tasks: vec![
                Task::new(0, 0.0, 0),
                Task::new(1, 1e9, 0),
                Task::new(2, 0.0, 0),
            ],
            edges: vec![Edge::new(0, 1, 500_000_000), Edge::new(1, 2, 500_000_000)],
            initial_id: 0,
            ending_id: 2,
        }
    }

    fn write_corpus(dir: &Path, dags: &[(&str, DagApp)]) {
        std::fs::create_dir_all(dir).unwrap();
        for (name, dag) in dags {
            std::fs::write(dir.join(format!("{name}.json")), flexdo::write_dag_file(dag)).unwrap();
        }
    }

    #[test]
    fn rate_sweep_on_trivial_chain_yields_three_rows_and_zero_gaps() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus = tmp.path().join("corpus");
        write_corpus(&corpus, &[("chain", heavy_chain())]);
        let cfg = ExperimentConfig {
            corpus: CorpusSource::Dir(corpus),
            scenario: ScenarioAxis::default_rate_mbps(),
            solvers: vec![SolverKind::NoOffloading, SolverKind::Exhaustive],
            cap: 12,
            out_dir: tmp.path().join("out"),
            timings: false,
        };
        let summary = run_experiment(&cfg).unwrap();
        let no_off: Vec<&ResultRow> =
            summary.rows.iter().filter(|r| r.solver == "no-offloading").collect();
        assert_eq!(no_off.len(), 3);
        for r in &summary.rows {
            assert_eq!(r.gap_pct.unwrap(), 0.0, "{} at {} should be optimal", r.solver, r.point);
            assert!(r.one_climb);
        }
    }

    #[test]
    fn experiment_is_byte_deterministic() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus = tmp.path().join("corpus");
        let params = GenParams::default().with_n_tasks(5, 7).with_seed(3);
        write_generated_corpus(&corpus, &params, 3).unwrap();

        let run = |out: PathBuf| -> Vec<String> {
            let cfg = ExperimentConfig {
                corpus: CorpusSource::Dir(corpus.clone()),
                scenario: ScenarioAxis::default_edge_cpus(),
                solvers: vec![
                    SolverKind::NoOffloading,
                    SolverKind::FlexdoN,
                    SolverKind::Exhaustive,
                ],
                cap: 12,
                out_dir: out,
                timings: false,
            };
            let summary = run_experiment(&cfg).unwrap();
            summary
                .files
                .iter()
                .map(|f| String::from_utf8(std::fs::read(f).unwrap()).unwrap())
                .collect()
        };
        let a = run(tmp.path().join("out_a"));
        let b = run(tmp.path().join("out_b"));
        assert_eq!(a, b);
    }

    #[test]
    fn aggregate_means_match_rows() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus = tmp.path().join("corpus");
        let params = GenParams::default().with_n_tasks(4, 6).with_seed(11);
        write_generated_corpus(&corpus, &params, 4).unwrap();
        let cfg = ExperimentConfig {
            corpus: CorpusSource::Dir(corpus),
            scenario: ScenarioAxis::default_rate_mbps(),
            solvers: vec![SolverKind::FlexdoN, SolverKind::Exhaustive],
            cap: 12,
            out_dir: tmp.path().join("out"),
            timings: false,
        };
        let summary = run_experiment(&cfg).unwrap();
        let aggregate = std::fs::read_to_string(&summary.files[1]).unwrap();
        for line in aggregate.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let (point, solver, mean): (&str, &str, f64) =
                (cols[1], cols[2], cols[5].parse().unwrap());
            let matching: Vec<f64> = summary
                .rows
                .iter()
                .filter(|r| r.point == point && r.solver == solver)
                .map(|r| r.makespan_s)
                .collect();
            let expect = matching.iter().sum::<f64>() / matching.len() as f64;
            assert!((mean - expect).abs() <= 1e-6 * expect.abs().max(1.0) + 1e-6);
        }
    }

    #[test]
    fn flexdo_rows_never_exceed_no_offloading_rows() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus = tmp.path().join("corpus");
        let params = GenParams::default().with_n_tasks(5, 8).with_seed(21);
        write_generated_corpus(&corpus, &params, 4).unwrap();
        let cfg = ExperimentConfig {
            corpus: CorpusSource::Dir(corpus),
            scenario: ScenarioAxis::default_mobile_cpus(),
            solvers: vec![SolverKind::NoOffloading, SolverKind::FlexdoSii(0), SolverKind::FlexdoN],
            cap: 12,
            out_dir: tmp.path().join("out"),
            timings: false,
        };
        let summary = run_experiment(&cfg).unwrap();
        for r in summary.rows.iter().filter(|r| r.solver.starts_with("flexdo")) {
            let base = summary
                .rows
                .iter()
                .find(|b| {
                    b.solver == "no-offloading" && b.dag_id == r.dag_id && b.point == r.point
                })
                .unwrap();
            assert!(r.makespan_s <= base.makespan_s + 1e-12);
        }
    }

    #[test]
    fn rows_are_reproducible_from_stored_decisions() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus_dir = tmp.path().join("corpus");
        let params = GenParams::default().with_n_tasks(5, 7).with_seed(31);
        write_generated_corpus(&corpus_dir, &params, 2).unwrap();
        let cfg = ExperimentConfig {
            corpus: CorpusSource::Dir(corpus_dir.clone()),
            scenario: ScenarioAxis::default_rate_mbps(),
            solvers: vec![SolverKind::FlexdoN2],
            cap: 12,
            out_dir: tmp.path().join("out"),
            timings: false,
        };
        let summary = run_experiment(&cfg).unwrap();
        let corpus = load_corpus(&CorpusSource::Dir(corpus_dir)).unwrap();
        let points = cfg.scenario.points();
        for r in &summary.rows {
            let dag = corpus
                .iter()
                .find(|e| e.id == r.dag_id)
                .and_then(|e| e.dag.as_ref().ok())
                .unwrap();
            let env = &points.iter().find(|(p, _)| *p == r.point).unwrap().1;
            let mut d = OffloadDecision::all_local(dag.tasks.len());
            for (i, c) in r.decision.chars().enumerate() {
                if c == '1' {
                    d.mark_offloaded(i);
                }
            }
            let again = simulate_makespan(dag, env, &d).unwrap();
            assert!((again - r.makespan_s).abs() <= 1e-12 * again.max(1.0));
        }
    }

    #[test]
    fn unreadable_corpus_entries_are_skipped_and_counted() {
        let tmp = tempfile::tempdir().unwrap();
        let corpus = tmp.path().join("corpus");
        write_corpus(&corpus, &[("good", heavy_chain())]);
        std::fs::write(corpus.join("bad.json"), b"{ not json").unwrap();
        let cfg = ExperimentConfig {
            corpus: CorpusSource::Dir(corpus),
            scenario: ScenarioAxis::default_rate_mbps(),
            solvers: vec![SolverKind::NoOffloading],
            cap: 12,
            out_dir: tmp.path().join("out"),
            timings: false,
        };
        let summary = run_experiment(&cfg).unwrap();
        assert_eq!(summary.skipped, 1);
        assert_eq!(summary.rows.len(), 3);
        let aggregate = std::fs::read_to_string(&summary.files[1]).unwrap();
        for line in aggregate.lines().skip(1) {
            assert_eq!(line.split(',').nth(4), Some("1"), "skipped column should be 1: {line}");
        }
    }

    #[test]
    fn stats_reports_density_extremes() {
        // Complete graph over 4 offloadable tasks: density 1.
        let mut complete = DagApp {
            tasks: vec![
                Task::new(0, 0.0, 0),
                Task::new(1, 1e9, 0),
                Task::new(2, 1e9, 0),
                Task::new(3, 1e9, 0),
                Task::new(4, 1e9, 0),
                Task::new(5, 0.0, 0),
            ],
            edges: vec![Edge::new(0, 1, 1), Edge::new(4, 5, 1)],
            initial_id: 0,
            ending_id: 5,
        };
        for i in 1..=4usize {
            for j in (i + 1)..=4 {
                complete.edges.push(Edge::new(i, j, 1));
            }
        }
        // Fork-join through the terminals only: zero offloadable edges.
        let edgeless = DagApp {
            tasks: vec![
                Task::new(0, 0.0, 0),
                Task::new(1, 1e9, 0),
                Task::new(2, 1e9, 0),
                Task::new(3, 0.0, 0),
            ],
            edges: vec![
                Edge::new(0, 1, 1),
                Edge::new(0, 2, 1),
                Edge::new(1, 3, 1),
                Edge::new(2, 3, 1),
            ],
            initial_id: 0,
            ending_id: 3,
        };
        let rows = corpus_stats(&[
            ("complete".into(), complete),
            ("edgeless".into(), edgeless),
        ])
        .unwrap();
        assert_eq!(rows[0].density, 1.0);
        assert_eq!(rows[1].density, 0.0);
        assert!(corpus_stats(&[]).is_err());
    }

    #[test]
    fn stats_single_dag_row() {
        let dag = flexdo::generate_dag(
            &GenParams::default().with_n_tasks(23, 23).with_seed(5),
        )
        .unwrap();
        let rows = corpus_stats(&[("one".into(), dag)]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n_offloadable, 23);
        let csv = render_stats_csv(&rows);
        assert!(csv.lines().nth(1).unwrap().starts_with("one,23,"));
    }

    #[test]
    fn census_on_local_optimal_chains_reports_zero() {
        let dags: Vec<(String, DagApp)> =
            (0..3).map(|i| (format!("chain-{i}"), heavy_chain())).collect();
        let env = presets::default_environment();
        let report = one_climb_census(&dags, &env, 12).unwrap();
        assert_eq!(report.total, 3);
        assert!(report.violating_ids.is_empty());
        assert_eq!(report.violating_fraction(), 0.0);
    }

    #[test]
    fn census_respects_the_cap() {
        let params = GenParams::default().with_n_tasks(14, 14).with_seed(1);
        let dag = flexdo::generate_dag(&params).unwrap();
        let env = presets::default_environment();
        assert!(one_climb_census(&[("big".into(), dag)], &env, 12).is_err());
    }

    #[test]
    fn solver_names_parse_and_print() {
        assert_eq!("flexdo-0".parse::<SolverKind>().unwrap(), SolverKind::FlexdoSii(0));
        assert_eq!("flexdo-n".parse::<SolverKind>().unwrap(), SolverKind::FlexdoN);
        assert_eq!("flexdo-n2".parse::<SolverKind>().unwrap(), SolverKind::FlexdoN2);
        assert_eq!("exhaustive".parse::<SolverKind>().unwrap(), SolverKind::Exhaustive);
        assert_eq!(SolverKind::FlexdoSii(5).name(), "flexdo-5");
        assert!("flexdo-x".parse::<SolverKind>().is_err());
    }
}
