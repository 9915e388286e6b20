//! Offloading-decision solvers: the FlexDO two-phase heuristic, exhaustive
//! enumeration, and the two baseline strategies, plus the edge-cost and
//! offloading-gain computations FlexDO ranks by.

use std::collections::BTreeMap;
use std::collections::HashSet;

use rayon::prelude::*;

use crate::dag::{DagApp, OffloadDecision};
use crate::env::Environment;
use crate::sim::{processing_time, SimError, Simulator};

/// Largest offloadable-task count accepted by [`exhaustive_optimal`].
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 26;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{n} offloadable tasks exceed the exhaustive cap of {cap}; raise the cap or use a heuristic solver")]
    TooManyTasks { n: usize, cap: usize },
    #[error("second phase would enumerate 2^{unmarked} decisions, which exceeds the 2^62 mask width")]
    EnumerationTooLarge { unmarked: usize },
    #[error("task {id} is a terminal and has no offloading gain")]
    TerminalTask { id: usize },
    #[error("relative gap is undefined for a non-positive optimal makespan")]
    NonPositiveOptimum,
}

/// FlexDO tuning: `s_ii` tasks are left to the exhaustive second phase and
/// the greedy first phase marks tasks until `N - s_ii` are offloaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlexdoParams {
    pub s_ii: usize,
}

impl FlexdoParams {
    pub fn new(s_ii: usize) -> Self {
        Self { s_ii }
    }

    /// Pure greedy: the second phase contributes a single decision.
    pub fn zero() -> Self {
        Self { s_ii: 0 }
    }

    /// `s_ii = log2(N)` rounded to the nearest integer, clamped to `[0, N]`,
    /// so the second phase contributes about `N` decisions.
    pub fn log_n(n_offloadable: usize) -> Self {
        Self { s_ii: rounded_log2(n_offloadable, 1.0) }
    }

    /// `s_ii = log2(N^2)` rounded and clamped, for about `N^2` decisions.
    pub fn log_n_squared(n_offloadable: usize) -> Self {
        Self { s_ii: rounded_log2(n_offloadable, 2.0) }
    }
}

fn rounded_log2(n: usize, factor: f64) -> usize {
    if n <= 1 {
        return 0;
    }
    let raw = (factor * (n as f64).log2()).round();
    (raw.max(0.0) as usize).min(n)
}

/// A solver's chosen decision, its simulated makespan, and the candidates
/// it considered. `candidate_set` is populated by FlexDO and omitted by the
/// exhaustive solver, whose candidate space is implicit.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub decision: OffloadDecision,
    pub makespan: f64,
    pub candidates_evaluated: usize,
    pub candidate_set: Option<Vec<OffloadDecision>>,
}

/// Every task on the mobile device.
pub fn no_offloading(dag: &DagApp) -> OffloadDecision {
    OffloadDecision::all_local(dag.tasks.len())
}

/// Every offloadable task on the edge server; terminals stay local.
pub fn full_offloading(dag: &DagApp) -> OffloadDecision {
    let mut d = OffloadDecision::all_local(dag.tasks.len());
    for id in dag.offloadable_ids() {
        d.mark_offloaded(id);
    }
    d
}

/// Ranking cost of every non-anchor edge: its solo transmission time minus
/// the solo transmission times of all anchor edges incident to either
/// endpoint. Costs can go negative; only their order matters.
pub fn adjusted_edge_costs(dag: &DagApp, env: &Environment) -> BTreeMap<(usize, usize), f64> {
    let mut anchor_touch = vec![0.0f64; dag.tasks.len()];
    for e in &dag.edges {
        if dag.is_anchor_edge(e) {
            let t = e.data_bytes as f64 / env.channel_rate;
            if e.src == dag.initial_id {
                anchor_touch[e.dst] += t;
            } else {
                anchor_touch[e.src] += t;
            }
        }
    }
    dag.edges
        .iter()
        .filter(|e| !dag.is_anchor_edge(e))
        .map(|e| {
            let solo = e.data_bytes as f64 / env.channel_rate;
            ((e.src, e.dst), solo - anchor_touch[e.src] - anchor_touch[e.dst])
        })
        .collect()
}

/// Offloading gain of task `k`: mobile minus edge processing time, minus
/// the solo transmission times of every edge incident to `k`.
pub fn offloading_gain(dag: &DagApp, env: &Environment, k: usize) -> Result<f64, SolveError> {
    if dag.is_terminal(k) {
        return Err(SolveError::TerminalTask { id: k });
    }
    let work = dag.tasks[k].work;
    let t_m = processing_time(work, &env.mobile);
    let t_e = processing_time(work, &env.edge);
    let tx: f64 = dag
        .edges
        .iter()
        .filter(|e| e.src == k || e.dst == k)
        .map(|e| e.data_bytes as f64 / env.channel_rate)
        .sum();
    Ok(t_m - t_e - tx)
}

/// The greedy first phase. Starting from No Offloading, repeatedly pick the
/// highest-cost remaining non-anchor edge, preferring edges with exactly one
/// endpoint already marked (marking the other) over fresh pairs (marking
/// both); every marking snapshot becomes a candidate decision. Fully marked
/// edges leave the pool. If the pool runs dry before `N - s_ii` marks, the
/// remaining tasks are marked one by one in descending offloading gain.
pub fn flexdo_phase_one(
    dag: &DagApp,
    env: &Environment,
    params: FlexdoParams,
) -> Vec<OffloadDecision> {
    let n = dag.n_offloadable();
    let s_ii = params.s_ii.min(n);
    let s_i = n - s_ii;

    let costs = adjusted_edge_costs(dag, env);
    // Pool entries keyed by (src, dst) for deterministic tie-breaking:
    // lower lexicographic order wins among equal costs.
    let mut pool: Vec<(usize, usize, f64)> = costs
        .iter()
        .map(|(&(src, dst), &c)| (src, dst, c))
        .collect();

    let mut current = no_offloading(dag);
    let mut decisions = vec![current.clone()];
    let mut marked = 0usize;

    while !pool.is_empty() && marked < s_i {
        let single: Option<&(usize, usize, f64)> = pool
            .iter()
            .filter(|(s, d, _)| current.is_offloaded(*s) != current.is_offloaded(*d))
            .fold(None, |best, e| match best {
                None => Some(e),
                Some(b) if better_edge(e, b) => Some(e),
                Some(b) => Some(b),
            });
        if let Some(&(s, d, _)) = single {
            let unmarked = if current.is_offloaded(s) { d } else { s };
            current.mark_offloaded(unmarked);
            marked += 1;
        } else {
            let &(s, d, _) = pool
                .iter()
                .fold(None, |best, e| match best {
                    None => Some(e),
                    Some(b) if better_edge(e, b) => Some(e),
                    Some(b) => Some(b),
                })
                .expect("pool is non-empty");
            current.mark_offloaded(s);
            current.mark_offloaded(d);
            marked += 2;
        }
        decisions.push(current.clone());
        pool.retain(|(s, d, _)| !(current.is_offloaded(*s) && current.is_offloaded(*d)));
    }

    if marked < s_i {
        let mut gains: Vec<(usize, f64)> = dag
            .offloadable_ids()
            .filter(|&id| !current.is_offloaded(id))
            .map(|id| (id, offloading_gain(dag, env, id).expect("offloadable task")))
            .collect();
        // Descending gain, ties to the lower task id.
        gains.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        for (id, _) in gains {
            if marked >= s_i {
                break;
            }
            current.mark_offloaded(id);
            marked += 1;
            decisions.push(current.clone());
        }
    }

    decisions
}

fn better_edge(a: &(usize, usize, f64), b: &(usize, usize, f64)) -> bool {
    a.2 > b.2 || (a.2 == b.2 && (a.0, a.1) < (b.0, b.1))
}

/// The complete FlexDO heuristic: phase-one decisions plus all completions
/// of the final one over its unmarked tasks, deduplicated, each simulated;
/// the shortest makespan wins, ties going to the earliest generated.
pub fn flexdo(
    dag: &DagApp,
    env: &Environment,
    params: FlexdoParams,
) -> Result<SolveOutcome, SolveError> {
    let sim = Simulator::new(dag, env)?;
    let phase_one = flexdo_phase_one(dag, env, params);
    let last = phase_one.last().expect("phase one always yields No Offloading").clone();

    let unmarked: Vec<usize> = dag
        .offloadable_ids()
        .filter(|&id| !last.is_offloaded(id))
        .collect();
    if unmarked.len() > 62 {
        return Err(SolveError::EnumerationTooLarge { unmarked: unmarked.len() });
    }

    let mut candidates = phase_one;
    for mask in 0..(1u64 << unmarked.len()) {
        let mut d = last.clone();
        for (bit, &id) in unmarked.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                d.mark_offloaded(id);
            }
        }
        candidates.push(d);
    }

    let mut seen: HashSet<OffloadDecision> = HashSet::with_capacity(candidates.len());
    let distinct: Vec<OffloadDecision> = candidates
        .into_iter()
        .filter(|d| seen.insert(d.clone()))
        .collect();

    let makespans: Vec<f64> = distinct
        .par_iter()
        .map(|d| sim.makespan(d))
        .collect::<Result<_, _>>()?;
    let best = makespans
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, &ms)| if ms < makespans[best] { i } else { best });

    Ok(SolveOutcome {
        decision: distinct[best].clone(),
        makespan: makespans[best],
        candidates_evaluated: distinct.len(),
        candidate_set: Some(distinct),
    })
}

/// Minimum-makespan decision over all `2^N` placements, with
/// [`DEFAULT_EXHAUSTIVE_CAP`] as the refusal threshold.
pub fn exhaustive_optimal(dag: &DagApp, env: &Environment) -> Result<SolveOutcome, SolveError> {
    exhaustive_optimal_with_cap(dag, env, DEFAULT_EXHAUSTIVE_CAP)
}

/// Exhaustive enumeration with an explicit cap. Ties between equal
/// makespans go to the lowest placement mask (task 1 in the lowest bit).
pub fn exhaustive_optimal_with_cap(
    dag: &DagApp,
    env: &Environment,
    cap: usize,
) -> Result<SolveOutcome, SolveError> {
    let n = dag.n_offloadable();
    if n > cap || n > 62 {
        return Err(SolveError::TooManyTasks { n, cap: cap.min(62) });
    }
    let sim = Simulator::new(dag, env)?;
    let total = 1usize << n;
    let (best_ms, best_mask) = (0..total)
        .into_par_iter()
        .with_min_len(256)
        .map(|mask| {
            let mask = mask as u64;
            let d = OffloadDecision::from_mask(dag, mask);
            sim.makespan(&d).map(|ms| (ms, mask))
        })
        .try_reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;

    Ok(SolveOutcome {
        decision: OffloadDecision::from_mask(dag, best_mask),
        makespan: best_ms,
        candidates_evaluated: total,
        candidate_set: None,
    })
}

/// Percentage by which a heuristic makespan exceeds the optimal one:
/// `100 * (heur - opt) / opt`.
pub fn relative_gap(heur: f64, opt: f64) -> Result<f64, SolveError> {
    if opt <= 0.0 {
        return Err(SolveError::NonPositiveOptimum);
    }
    Ok(100.0 * (heur - opt) / opt)
}
