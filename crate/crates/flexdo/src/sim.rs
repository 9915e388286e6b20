//! Deterministic event-driven makespan evaluation.
//!
//! A task becomes ready once every incoming edge has delivered its data and
//! then starts immediately on its assigned device. Devices run all their
//! tasks concurrently under processor sharing: with `p` tasks on a device
//! with `u` CPUs, every task advances at rate `1 / max(1, p/u)`. The wireless
//! channel is split evenly among all in-flight transmissions, uplink and
//! downlink pooled together. Between events every rate is constant, so the
//! simulation advances interval by interval to the next finish time.

use std::collections::BTreeSet;
use std::fmt;

use crate::dag::{DagApp, OffloadDecision};
use crate::env::{CpuCount, DeviceSpec, Environment};

/// Events closer than this many seconds are treated as simultaneous.
pub const SIMULTANEITY_EPS: f64 = 1e-12;

/// Solo processing time of a task with `work` operations on `spec`:
/// `work / (clock_hz * ops_per_cycle)`. This is also the task's minimal
/// completion time, since the scale factor never drops below 1.
pub fn processing_time(work: f64, spec: &DeviceSpec) -> f64 {
    work / spec.ops_per_sec()
}

/// Instantaneous CPU scale factor with `p` running tasks on `cpus` CPUs:
/// `max(1, p / u)`, and exactly 1 for unlimited CPUs.
pub fn cpu_scale_factor(p: u32, cpus: CpuCount) -> f64 {
    match cpus {
        CpuCount::Unlimited => 1.0,
        CpuCount::Limited(u) => (p as f64 / u as f64).max(1.0),
    }
}

/// Remaining wall-clock time after a scale-factor change from `k_old` to
/// `k_new`. The same algebra serves CPU shares and channel shares.
pub fn rescale_remaining(remaining: f64, k_old: f64, k_new: f64) -> f64 {
    remaining * k_new / k_old
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    TaskStart,
    TaskFinish,
    TxStart,
    TxFinish,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::TaskStart => "task_start",
            EventKind::TaskFinish => "task_finish",
            EventKind::TxStart => "tx_start",
            EventKind::TxFinish => "tx_finish",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Task(usize),
    Edge { src: usize, dst: usize },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Task(id) => write!(f, "{id}"),
            Subject::Edge { src, dst } => write!(f, "{src}->{dst}"),
        }
    }
}

/// One simulation event with the scale factors in effect just after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
    pub subject: Subject,
    pub k_p_mobile: f64,
    pub k_p_edge: f64,
    pub k_t: u32,
}

/// Makespan plus the ordered event trace that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub makespan: f64,
    pub trace: Vec<TraceEvent>,
}

/// Renders a trace as CSV with a header row and 9 significant digits.
pub fn trace_to_csv(result: &SimResult) -> String {
    let mut out = String::from("time,kind,subject,k_p_mobile,k_p_edge,k_t\n");
    for ev in &result.trace {
        out.push_str(&format!(
            "{:.8e},{},{},{:.8e},{:.8e},{}\n",
            ev.time, ev.kind, ev.subject, ev.k_p_mobile, ev.k_p_edge, ev.k_t
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("environment is invalid (non-positive clock, capacity, or channel rate)")]
    InvalidEnvironment,
    #[error("edge ({src}, {dst}) references a task outside 0..{n_tasks}")]
    EdgeOutOfRange { src: usize, dst: usize, n_tasks: usize },
    #[error("task {id} has negative or non-finite work")]
    BadWork { id: usize },
    #[error("decision has {found} placements but the DAG has {expected} tasks")]
    DecisionLength { expected: usize, found: usize },
    #[error("decision offloads terminal task {id}")]
    TerminalOffloaded { id: usize },
    #[error("simulation stalled at t = {time}: tasks remain but nothing can run (cycle or unreachable task)")]
    Stalled { time: f64 },
}

/// A `(dag, env)` pair prepared for repeated evaluation of decisions.
/// Construction precomputes adjacency and solo times; each decision is then
/// evaluated without re-deriving them.
pub struct Simulator<'a> {
    dag: &'a DagApp,
    env: &'a Environment,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    solo_mobile: Vec<f64>,
    solo_edge: Vec<f64>,
    solo_tx: Vec<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(dag: &'a DagApp, env: &'a Environment) -> Result<Self, SimError> {
        if !env.is_valid() {
            return Err(SimError::InvalidEnvironment);
        }
        let n = dag.tasks.len();
        for e in &dag.edges {
            if e.src >= n || e.dst >= n {
                return Err(SimError::EdgeOutOfRange { src: e.src, dst: e.dst, n_tasks: n });
            }
        }
        for t in &dag.tasks {
            if !t.work.is_finite() || t.work < 0.0 {
                return Err(SimError::BadWork { id: t.id });
            }
        }
        let solo_mobile = dag.tasks.iter().map(|t| processing_time(t.work, &env.mobile)).collect();
        let solo_edge = dag.tasks.iter().map(|t| processing_time(t.work, &env.edge)).collect();
        let solo_tx = dag.edges.iter().map(|e| e.data_bytes as f64 / env.channel_rate).collect();
        Ok(Self {
            dag,
            env,
            in_edges: dag.in_edge_index(),
            out_edges: dag.out_edge_index(),
            solo_mobile,
            solo_edge,
            solo_tx,
        })
    }

    /// Makespan only; skips trace recording.
    pub fn makespan(&self, d: &OffloadDecision) -> Result<f64, SimError> {
        Ok(self.run(d, false)?.makespan)
    }

    /// Full result with the event trace.
    pub fn result(&self, d: &OffloadDecision) -> Result<SimResult, SimError> {
        self.run(d, true)
    }

    fn check_decision(&self, d: &OffloadDecision) -> Result<(), SimError> {
        let n = self.dag.tasks.len();
        if d.len() != n {
            return Err(SimError::DecisionLength { expected: n, found: d.len() });
        }
        for id in [self.dag.initial_id, self.dag.ending_id] {
            if id < n && d.is_offloaded(id) {
                return Err(SimError::TerminalOffloaded { id });
            }
        }
        Ok(())
    }

    fn run(&self, d: &OffloadDecision, record: bool) -> Result<SimResult, SimError> {
        self.check_decision(d)?;
        let n = self.dag.tasks.len();
        let m = self.dag.edges.len();

        // Per-task solo time on its assigned device and per-edge cross flag.
        let solo: Vec<f64> = (0..n)
            .map(|i| if d.is_offloaded(i) { self.solo_edge[i] } else { self.solo_mobile[i] })
            .collect();
        let cross: Vec<bool> = self
            .dag
            .edges
            .iter()
            .map(|e| d.is_offloaded(e.src) != d.is_offloaded(e.dst))
            .collect();

        #[derive(Clone, Copy, PartialEq)]
        enum TaskPhase {
            Waiting,
            Running,
            Done,
        }
        #[derive(Clone, Copy, PartialEq)]
        enum EdgePhase {
            Pending,
            InFlight,
            Delivered,
        }

        let mut task_phase = vec![TaskPhase::Waiting; n];
        let mut task_rem = vec![0.0f64; n];
        let mut undelivered: Vec<usize> = self.in_edges.iter().map(|v| v.len()).collect();
        let mut edge_phase = vec![EdgePhase::Pending; m];
        let mut edge_rem = vec![0.0f64; m];

        let mut p_mobile: u32 = 0;
        let mut p_edge: u32 = 0;
        let mut k_t: u32 = 0;
        let mut time: f64 = 0.0;
        let mut trace: Vec<TraceEvent> = Vec::new();

        let mut fin_tx: BTreeSet<usize> = BTreeSet::new();
        let mut fin_task: BTreeSet<usize> = BTreeSet::new();
        let mut start_tx: BTreeSet<usize> = BTreeSet::new();
        let mut start_task: BTreeSet<usize> = BTreeSet::new();

        macro_rules! emit {
            ($kind:expr, $subject:expr) => {
                if record {
                    trace.push(TraceEvent {
                        time,
                        kind: $kind,
                        subject: $subject,
                        k_p_mobile: cpu_scale_factor(p_mobile, self.env.mobile.cpus),
                        k_p_edge: cpu_scale_factor(p_edge, self.env.edge.cpus),
                        k_t,
                    });
                }
            };
        }

        macro_rules! deliver {
            ($ei:expr) => {{
                let dst = self.dag.edges[$ei].dst;
                undelivered[dst] -= 1;
                if undelivered[dst] == 0 && task_phase[dst] == TaskPhase::Waiting {
                    start_task.insert(dst);
                }
            }};
        }

        if undelivered[self.dag.initial_id] == 0 {
            start_task.insert(self.dag.initial_id);
        }

        loop {
            // Drain all events at the current timestamp: finishes before
            // starts, transmissions before tasks, ascending subject id.
            loop {
                if let Some(&ei) = fin_tx.iter().next() {
                    fin_tx.remove(&ei);
                    k_t -= 1;
                    edge_phase[ei] = EdgePhase::Delivered;
                    let e = &self.dag.edges[ei];
                    emit!(EventKind::TxFinish, Subject::Edge { src: e.src, dst: e.dst });
                    deliver!(ei);
                } else if let Some(&i) = fin_task.iter().next() {
                    fin_task.remove(&i);
                    task_phase[i] = TaskPhase::Done;
                    if solo[i] > 0.0 {
                        if d.is_offloaded(i) {
                            p_edge -= 1;
                        } else {
                            p_mobile -= 1;
                        }
                    }
                    emit!(EventKind::TaskFinish, Subject::Task(i));
                    for &ei in &self.out_edges[i] {
                        if cross[ei] {
                            start_tx.insert(ei);
                        } else {
                            edge_phase[ei] = EdgePhase::Delivered;
                            deliver!(ei);
                        }
                    }
                } else if let Some(&ei) = start_tx.iter().next() {
                    start_tx.remove(&ei);
                    let e = &self.dag.edges[ei];
                    if self.solo_tx[ei] > 0.0 {
                        k_t += 1;
                        edge_phase[ei] = EdgePhase::InFlight;
                        edge_rem[ei] = self.solo_tx[ei];
                        emit!(EventKind::TxStart, Subject::Edge { src: e.src, dst: e.dst });
                    } else {
                        // Zero bytes: completes instantly, never occupies
                        // the channel.
                        emit!(EventKind::TxStart, Subject::Edge { src: e.src, dst: e.dst });
                        edge_phase[ei] = EdgePhase::Delivered;
                        emit!(EventKind::TxFinish, Subject::Edge { src: e.src, dst: e.dst });
                        deliver!(ei);
                    }
                } else if let Some(&i) = start_task.iter().next() {
                    start_task.remove(&i);
                    task_phase[i] = TaskPhase::Running;
                    task_rem[i] = solo[i];
                    if solo[i] > 0.0 {
                        if d.is_offloaded(i) {
                            p_edge += 1;
                        } else {
                            p_mobile += 1;
                        }
                        emit!(EventKind::TaskStart, Subject::Task(i));
                    } else {
                        // Zero work: starts and finishes at the same instant
                        // without perturbing the CPU scale factor.
                        emit!(EventKind::TaskStart, Subject::Task(i));
                        fin_task.insert(i);
                    }
                } else {
                    break;
                }
            }

            if task_phase[self.dag.ending_id] == TaskPhase::Done {
                break;
            }

            // Next finish time across running tasks and in-flight edges.
            let k_m = cpu_scale_factor(p_mobile, self.env.mobile.cpus);
            let k_e = cpu_scale_factor(p_edge, self.env.edge.cpus);
            let k_c = k_t as f64;
            let mut t_star = f64::INFINITY;
            for i in 0..n {
                if task_phase[i] == TaskPhase::Running {
                    let k = if d.is_offloaded(i) { k_e } else { k_m };
                    t_star = t_star.min(time + task_rem[i] * k);
                }
            }
            for ei in 0..m {
                if edge_phase[ei] == EdgePhase::InFlight {
                    t_star = t_star.min(time + edge_rem[ei] * k_c);
                }
            }
            if !t_star.is_finite() {
                return Err(SimError::Stalled { time });
            }

            // Advance to t_star; everything projected within the
            // simultaneity window finishes now.
            let dt = t_star - time;
            let cutoff = t_star + SIMULTANEITY_EPS;
            for i in 0..n {
                if task_phase[i] == TaskPhase::Running {
                    let k = if d.is_offloaded(i) { k_e } else { k_m };
                    if time + task_rem[i] * k <= cutoff {
                        task_rem[i] = 0.0;
                        fin_task.insert(i);
                    } else {
                        task_rem[i] -= dt / k;
                    }
                }
            }
            for ei in 0..m {
                if edge_phase[ei] == EdgePhase::InFlight {
                    if time + edge_rem[ei] * k_c <= cutoff {
                        edge_rem[ei] = 0.0;
                        fin_tx.insert(ei);
                    } else {
                        edge_rem[ei] -= dt / k_c;
                    }
                }
            }
            time = t_star;
        }

        debug_assert_eq!(k_t, 0, "transmissions still in flight at makespan");
        debug_assert_eq!(p_mobile + p_edge, 0, "tasks still running at makespan");
        Ok(SimResult { makespan: time, trace })
    }
}

/// Simulates one decision and returns the makespan with a full event trace.
///
/// The DAG is assumed valid (see [`crate::dag::validate`]); a cyclic or
/// disconnected graph surfaces as [`SimError::Stalled`].
pub fn simulate(dag: &DagApp, env: &Environment, d: &OffloadDecision) -> Result<SimResult, SimError> {
    Simulator::new(dag, env)?.result(d)
}

/// Makespan without trace recording; same arithmetic as [`simulate`].
pub fn simulate_makespan(
    dag: &DagApp,
    env: &Environment,
    d: &OffloadDecision,
) -> Result<f64, SimError> {
    Simulator::new(dag, env)?.makespan(d)
}

/// Lower bound on the makespan: the longest path through the DAG scoring
/// each task at its solo processing time and each cross-placement edge at
/// its solo transmission time (same-placement edges cost nothing). Scale
/// factors never fall below 1, so no decision can beat this.
pub fn solo_critical_path(dag: &DagApp, env: &Environment, d: &OffloadDecision) -> Option<f64> {
    let order = dag.topo_order()?;
    let n = dag.tasks.len();
    let in_edges = dag.in_edge_index();
    let solo: Vec<f64> = (0..n)
        .map(|i| {
            let spec = if d.is_offloaded(i) { &env.edge } else { &env.mobile };
            processing_time(dag.tasks[i].work, spec)
        })
        .collect();
    let mut finish = vec![0.0f64; n];
    for &v in &order {
        let mut ready = 0.0f64;
        for &ei in &in_edges[v] {
            let e = &dag.edges[ei];
            let tx = if d.is_offloaded(e.src) != d.is_offloaded(e.dst) {
                e.data_bytes as f64 / env.channel_rate
            } else {
                0.0
            };
            ready = ready.max(finish[e.src] + tx);
        }
        finish[v] = ready + solo[v];
    }
    Some(finish.iter().cloned().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{DagApp, Edge, OffloadDecision, Task};
    use crate::env::presets;
    use approx::assert_relative_eq;

    fn env(mobile_ops: f64, mobile_cpus: CpuCount, edge_ops: f64, rate: f64) -> Environment {
        Environment {
            mobile: DeviceSpec::new(mobile_cpus, mobile_ops, 1.0),
            edge: DeviceSpec::new(CpuCount::Limited(16), edge_ops, 1.0),
            channel_rate: rate,
        }
    }

    fn chain(works: &[f64], payloads: &[u64]) -> DagApp {
        assert_eq!(payloads.len(), works.len() + 1);
        let n = works.len() + 2;
        let mut tasks = vec![Task::new(0, 0.0, 0)];
        for (i, &w) in works.iter().enumerate() {
            tasks.push(Task::new(i + 1, w, 0));
        }
        tasks.push(Task::new(n - 1, 0.0, 0));
        let edges = payloads
            .iter()
            .enumerate()
            .map(|(i, &p)| Edge::new(i, i + 1, p))
            .collect();
        DagApp { tasks, edges, initial_id: 0, ending_id: n - 1 }
    }

    #[test]
    fn processing_time_examples() {
        let cluster_like = DeviceSpec::new(CpuCount::Limited(48), 2.5e9, 32.0);
        assert_relative_eq!(processing_time(1e9, &cluster_like), 0.0125);
        assert_relative_eq!(processing_time(0.0, &cluster_like), 0.0);
        let edge = presets::xeon_d2100();
        assert_relative_eq!(processing_time(8e9, &edge), 0.125);
    }

    #[test]
    fn cpu_scale_factor_examples() {
        assert_relative_eq!(cpu_scale_factor(3, CpuCount::Limited(4)), 1.0);
        assert_relative_eq!(cpu_scale_factor(6, CpuCount::Limited(4)), 1.5);
        assert_relative_eq!(cpu_scale_factor(100, CpuCount::Unlimited), 1.0);
        assert_relative_eq!(cpu_scale_factor(0, CpuCount::Limited(2)), 1.0);
    }

    #[test]
    fn rescale_remaining_examples() {
        assert_relative_eq!(rescale_remaining(10.0, 1.0, 2.0), 20.0);
        assert_relative_eq!(rescale_remaining(20.0, 2.0, 1.0), 10.0);
        assert_relative_eq!(rescale_remaining(7.0, 3.0, 3.0), 7.0);
    }

    #[test]
    fn local_chain_makespan_is_processing_time() {
        // Task 1 local with a 10 s solo time; no cross edges.
        let dag = chain(&[10e9], &[1_000, 1_000]);
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let d = OffloadDecision::all_local(3);
        let r = simulate(&dag, &e, &d).unwrap();
        assert_relative_eq!(r.makespan, 10.0, max_relative = 1e-12);
        // Terminals and same-placement edges never touch the channel.
        assert!(r.trace.iter().all(|ev| ev.k_t == 0));
    }

    #[test]
    fn two_parallel_tasks_share_one_cpu() {
        // 0 -> {1, 2} -> 3, both offloadable tasks local on a 1-CPU device.
        let tasks = vec![
            Task::new(0, 0.0, 0),
            Task::new(1, 10e9, 0),
            Task::new(2, 10e9, 0),
            Task::new(3, 0.0, 0),
        ];
        let edges = vec![
            Edge::new(0, 1, 0),
            Edge::new(0, 2, 0),
            Edge::new(1, 3, 0),
            Edge::new(2, 3, 0),
        ];
        let dag = DagApp { tasks, edges, initial_id: 0, ending_id: 3 };
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let d = OffloadDecision::all_local(4);
        let r = simulate(&dag, &e, &d).unwrap();
        assert_relative_eq!(r.makespan, 20.0, max_relative = 1e-12);
        let finishes: Vec<f64> = r
            .trace
            .iter()
            .filter(|ev| ev.kind == EventKind::TaskFinish && matches!(ev.subject, Subject::Task(1 | 2)))
            .map(|ev| ev.time)
            .collect();
        assert_eq!(finishes.len(), 2);
        assert_relative_eq!(finishes[0], 20.0, max_relative = 1e-12);
        assert_relative_eq!(finishes[1], 20.0, max_relative = 1e-12);
    }

    #[test]
    fn offloaded_chain_pays_uplink_and_downlink() {
        // Anchors carry 2.5e6 bytes at 2.5e6 B/s; task 1 takes 2 s on the
        // idle edge server: 1 + 2 + 1.
        let dag = chain(&[2e10], &[2_500_000, 2_500_000]);
        let e = env(1e9, CpuCount::Limited(4), 1e10, 2.5e6);
        let mut d = OffloadDecision::all_local(3);
        d.mark_offloaded(1);
        let r = simulate(&dag, &e, &d).unwrap();
        assert_relative_eq!(r.makespan, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn simultaneous_transmissions_halve_the_rate() {
        // 0 -> {1, 2} -> 3 with both tasks offloaded: the two anchor uplinks
        // of 1 s solo each start together and finish at 2 s.
        let tasks = vec![
            Task::new(0, 0.0, 0),
            Task::new(1, 1e9, 0),
            Task::new(2, 1e9, 0),
            Task::new(3, 0.0, 0),
        ];
        let edges = vec![
            Edge::new(0, 1, 1_000_000),
            Edge::new(0, 2, 1_000_000),
            Edge::new(1, 3, 0),
            Edge::new(2, 3, 0),
        ];
        let dag = DagApp { tasks, edges, initial_id: 0, ending_id: 3 };
        let e = env(1e9, CpuCount::Limited(4), 1e10, 1e6);
        let mut d = OffloadDecision::all_local(4);
        d.mark_offloaded(1);
        d.mark_offloaded(2);
        let r = simulate(&dag, &e, &d).unwrap();
        let uplink_finishes: Vec<&TraceEvent> = r
            .trace
            .iter()
            .filter(|ev| ev.kind == EventKind::TxFinish && matches!(ev.subject, Subject::Edge { src: 0, .. }))
            .collect();
        assert_eq!(uplink_finishes.len(), 2);
        for ev in uplink_finishes {
            assert_relative_eq!(ev.time, 2.0, max_relative = 1e-12);
        }
    }

    /// Five offloadable tasks, task 2 offloaded, 1-CPU mobile device.
    /// Hand-stepped timeline: 1 finishes at 2; 3 and 5 share the CPU from
    /// t=2; the uplink for (1,2) lands at 4; 5 finishes at 6, releasing the
    /// CPU so 3 finishes at 8; task 2 runs 4..7 on the edge; its 4 s
    /// downlink lands at 11; the join task 4 runs 11..12. Makespan 12.
    #[test]
    fn mixed_placement_matches_hand_stepped_timeline() {
        let tasks = vec![
            Task::new(0, 0.0, 0),
            Task::new(1, 2e9, 0),
            Task::new(2, 30e9, 0),
            Task::new(3, 4e9, 0),
            Task::new(4, 1e9, 0),
            Task::new(5, 2e9, 0),
            Task::new(6, 0.0, 0),
        ];
        let edges = vec![
            Edge::new(0, 1, 1_000_000),
            Edge::new(1, 2, 2_000_000),
            Edge::new(1, 3, 3_000_000),
            Edge::new(1, 5, 1_000_000),
            Edge::new(2, 4, 4_000_000),
            Edge::new(3, 4, 1_000_000),
            Edge::new(5, 4, 1_000_000),
            Edge::new(4, 6, 1_000_000),
        ];
        let dag = DagApp { tasks, edges, initial_id: 0, ending_id: 6 };
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let mut d = OffloadDecision::all_local(7);
        d.mark_offloaded(2);
        let r = simulate(&dag, &e, &d).unwrap();
        assert_relative_eq!(r.makespan, 12.0, max_relative = 1e-9);

        let finish_of = |id: usize| {
            r.trace
                .iter()
                .find(|ev| ev.kind == EventKind::TaskFinish && ev.subject == Subject::Task(id))
                .unwrap()
                .time
        };
        assert_relative_eq!(finish_of(1), 2.0, max_relative = 1e-9);
        assert_relative_eq!(finish_of(5), 6.0, max_relative = 1e-9);
        assert_relative_eq!(finish_of(3), 8.0, max_relative = 1e-9);
        assert_relative_eq!(finish_of(2), 7.0, max_relative = 1e-9);
        assert_relative_eq!(finish_of(4), 12.0, max_relative = 1e-9);
    }

    #[test]
    fn makespan_equals_last_trace_event() {
        let dag = chain(&[5e9, 3e9], &[1_000_000, 500_000, 2_000_000]);
        let e = env(1e9, CpuCount::Limited(2), 1e10, 1e6);
        let mut d = OffloadDecision::all_local(4);
        d.mark_offloaded(1);
        let r = simulate(&dag, &e, &d).unwrap();
        assert_eq!(r.makespan, r.trace.last().unwrap().time);
    }

    #[test]
    fn identical_runs_give_byte_identical_traces() {
        let dag = chain(&[5e9, 3e9, 7e9], &[1_000_000, 500_000, 2_000_000, 750_000]);
        let e = env(1e9, CpuCount::Limited(2), 1e10, 1e6);
        let mut d = OffloadDecision::all_local(5);
        d.mark_offloaded(2);
        let a = simulate(&dag, &e, &d).unwrap();
        let b = simulate(&dag, &e, &d).unwrap();
        assert_eq!(trace_to_csv(&a), trace_to_csv(&b));
    }

    #[test]
    fn makespan_respects_solo_critical_path() {
        let dag = chain(&[5e9, 3e9, 7e9], &[1_000_000, 500_000, 2_000_000, 750_000]);
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let mut d = OffloadDecision::all_local(5);
        d.mark_offloaded(2);
        let lower = solo_critical_path(&dag, &e, &d).unwrap();
        let got = simulate_makespan(&dag, &e, &d).unwrap();
        assert!(got >= lower - 1e-12, "makespan {got} below lower bound {lower}");
    }

    #[test]
    fn cyclic_graph_stalls() {
        let mut dag = chain(&[1e9], &[1_000, 1_000]);
        dag.edges.push(Edge::new(2, 1, 5));
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let d = OffloadDecision::all_local(3);
        assert!(matches!(simulate(&dag, &e, &d), Err(SimError::Stalled { .. })));
    }

    #[test]
    fn decision_shape_errors() {
        let dag = chain(&[1e9], &[1_000, 1_000]);
        let e = env(1e9, CpuCount::Limited(1), 1e10, 1e6);
        let d = OffloadDecision::all_local(5);
        assert!(matches!(simulate(&dag, &e, &d), Err(SimError::DecisionLength { .. })));
        let mut bad = OffloadDecision::all_local(3);
        bad.set(0, true);
        assert!(matches!(
            simulate(&dag, &e, &bad),
            Err(SimError::TerminalOffloaded { id: 0 })
        ));
    }
}
