//! DAG application model: tasks, data edges, offloading decisions,
//! validation, anchor identification, terminal augmentation, and the
//! one-climb policy checker.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One task of an application. `work` is the task's operation count and
/// `mem_bytes` the size of its in-memory data structure, which bounds the
/// total payload of its incoming edges when payloads are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: usize,
    pub work: f64,
    pub mem_bytes: u64,
}

impl Task {
    pub fn new(id: usize, work: f64, mem_bytes: u64) -> Self {
        Self { id, work, mem_bytes }
    }
}

/// A data dependency: `data_bytes` flow from `src` to `dst` once `src`
/// finishes. Zero bytes is a pure precedence constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub data_bytes: u64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, data_bytes: u64) -> Self {
        Self { src, dst, data_bytes }
    }
}

/// A complete DAG application. Task ids are dense: 0 is the initial task,
/// `tasks.len() - 1` the ending task, and everything in between is
/// offloadable. Both terminals carry zero work and run on the mobile device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DagApp {
    pub tasks: Vec<Task>,
    pub edges: Vec<Edge>,
    #[serde(rename = "initial")]
    pub initial_id: usize,
    #[serde(rename = "ending")]
    pub ending_id: usize,
}

/// A task graph before terminal augmentation: dense ids `0..tasks.len()`,
/// any number of sources and sinks, no designated terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDag {
    pub tasks: Vec<Task>,
    pub edges: Vec<Edge>,
}

impl DagApp {
    /// Number of offloadable tasks (everything except the two terminals).
    pub fn n_offloadable(&self) -> usize {
        self.tasks.len().saturating_sub(2)
    }

    pub fn is_terminal(&self, id: usize) -> bool {
        id == self.initial_id || id == self.ending_id
    }

    /// Ids of the offloadable tasks, ascending.
    pub fn offloadable_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tasks.len()).filter(move |&id| !self.is_terminal(id))
    }

    /// Indices into `edges` of the edges out of each task.
    pub fn out_edge_index(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.tasks.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.src < out.len() {
                out[e.src].push(i);
            }
        }
        out
    }

    /// Indices into `edges` of the edges into each task.
    pub fn in_edge_index(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.tasks.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.dst < inc.len() {
                inc[e.dst].push(i);
            }
        }
        inc
    }

    /// Whether `e` touches a terminal (outgoing from the initial task or
    /// incoming to the ending task).
    pub fn is_anchor_edge(&self, e: &Edge) -> bool {
        e.src == self.initial_id || e.dst == self.ending_id
    }

    /// Indices into `edges` of the anchor edges. Assumes a valid DAG; use
    /// [`anchors`] for the validating variant.
    pub fn anchor_edge_indices(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.is_anchor_edge(&self.edges[i]))
            .collect()
    }

    /// Tasks in a topological order, or `None` if the edge set has a cycle.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.tasks.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            if e.src < n && e.dst < n {
                indeg[e.dst] += 1;
            }
        }
        let out = self.out_edge_index();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &ei in &out[v] {
                let d = self.edges[ei].dst;
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// A placement bit per task id: `false` = mobile device, `true` = edge
/// server. Terminals are always placed on the mobile device.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OffloadDecision {
    placement: Vec<bool>,
}

impl OffloadDecision {
    /// Every task on the mobile device.
    pub fn all_local(n_tasks: usize) -> Self {
        Self { placement: vec![false; n_tasks] }
    }

    pub fn len(&self) -> usize {
        self.placement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placement.is_empty()
    }

    pub fn is_offloaded(&self, id: usize) -> bool {
        self.placement[id]
    }

    pub fn mark_offloaded(&mut self, id: usize) {
        self.placement[id] = true;
    }

    pub fn set(&mut self, id: usize, offloaded: bool) {
        self.placement[id] = offloaded;
    }

    /// Number of offloaded tasks.
    pub fn offloaded_count(&self) -> usize {
        self.placement.iter().filter(|&&b| b).count()
    }

    /// Decision for `dag` with the offloadable tasks assigned from the bits
    /// of `mask`: bit `i` of the mask places task `i + 1`.
    pub fn from_mask(dag: &DagApp, mask: u64) -> Self {
        let mut d = Self::all_local(dag.tasks.len());
        for (bit, id) in dag.offloadable_ids().enumerate() {
            if mask >> bit & 1 == 1 {
                d.placement[id] = true;
            }
        }
        d
    }

    /// `"0"`/`"1"` per task id, e.g. `"01100"`.
    pub fn bitstring(&self) -> String {
        self.placement.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Whether this decision is shaped for `dag`: right length and both
    /// terminals on the mobile device.
    pub fn is_valid_for(&self, dag: &DagApp) -> bool {
        self.placement.len() == dag.tasks.len()
            && !self.placement[dag.initial_id]
            && !self.placement[dag.ending_id]
    }
}

/// A single violated invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoTasks,
    NonDenseIds { position: usize, id: usize },
    InitialIdMismatch { found: usize },
    EndingIdMismatch { found: usize },
    EdgeEndpointUnknown { src: usize, dst: usize },
    SelfLoop { id: usize },
    DuplicateEdge { src: usize, dst: usize },
    Cycle,
    Disconnected { unreached: usize },
    InitialHasIncoming,
    EndingHasOutgoing,
    ExtraSource { id: usize },
    ExtraSink { id: usize },
    TerminalHasWork { id: usize },
    ZeroWorkOffloadable { id: usize },
    NonFiniteWork { id: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoTasks => write!(f, "no tasks"),
            NonDenseIds { position, id } => {
                write!(f, "task ids are not dense: position {position} holds id {id}")
            }
            InitialIdMismatch { found } => {
                write!(f, "initial task id must be 0, found {found}")
            }
            EndingIdMismatch { found } => {
                write!(f, "ending task id must be the last id, found {found}")
            }
            EdgeEndpointUnknown { src, dst } => {
                write!(f, "edge ({src}, {dst}) references an unknown task")
            }
            SelfLoop { id } => write!(f, "self loop on task {id}"),
            DuplicateEdge { src, dst } => write!(f, "duplicate edge ({src}, {dst})"),
            Cycle => write!(f, "cycle in the edge set"),
            Disconnected { unreached } => {
                write!(f, "disconnected: {unreached} task(s) unreachable in the undirected graph")
            }
            InitialHasIncoming => write!(f, "initial task has incoming edges"),
            EndingHasOutgoing => write!(f, "ending task has outgoing edges"),
            ExtraSource { id } => {
                write!(f, "multiple sources: task {id} has no incoming edges but is not the initial task")
            }
            ExtraSink { id } => {
                write!(f, "multiple sinks: task {id} has no outgoing edges but is not the ending task")
            }
            TerminalHasWork { id } => write!(f, "terminal task {id} must have zero work"),
            ZeroWorkOffloadable { id } => {
                write!(f, "offloadable task {id} has zero work (only terminals may)")
            }
            NonFiniteWork { id } => write!(f, "task {id} has negative or non-finite work"),
        }
    }
}

/// Outcome of [`validate`]: empty means the DAG satisfies every invariant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DagError {
    #[error("invalid DAG: {0}")]
    Invalid(ValidationReport),
    #[error("decision has {found} placements but the DAG has {expected} tasks")]
    DecisionLength { expected: usize, found: usize },
    #[error("decision offloads terminal task {id}")]
    TerminalOffloaded { id: usize },
}

/// Checks every `DagApp` invariant and reports all violations found.
/// Violations are data, not failures: an empty report means valid.
pub fn validate(dag: &DagApp) -> ValidationReport {
    let mut violations = Vec::new();
    let n = dag.tasks.len();

    if n == 0 {
        return ValidationReport { violations: vec![Violation::NoTasks] };
    }

    for (pos, t) in dag.tasks.iter().enumerate() {
        if t.id != pos {
            violations.push(Violation::NonDenseIds { position: pos, id: t.id });
        }
        if !t.work.is_finite() || t.work < 0.0 {
            violations.push(Violation::NonFiniteWork { id: pos });
        }
    }
    if dag.initial_id != 0 {
        violations.push(Violation::InitialIdMismatch { found: dag.initial_id });
    }
    if dag.ending_id != n - 1 {
        violations.push(Violation::EndingIdMismatch { found: dag.ending_id });
    }

    let mut seen = BTreeSet::new();
    let mut endpoints_ok = true;
    for e in &dag.edges {
        if e.src >= n || e.dst >= n {
            violations.push(Violation::EdgeEndpointUnknown { src: e.src, dst: e.dst });
            endpoints_ok = false;
            continue;
        }
        if e.src == e.dst {
            violations.push(Violation::SelfLoop { id: e.src });
        }
        if !seen.insert((e.src, e.dst)) {
            violations.push(Violation::DuplicateEdge { src: e.src, dst: e.dst });
        }
    }

    // Degree, cycle, and connectivity checks only make sense on a graph
    // whose edges all point at real tasks.
    if !endpoints_ok {
        return ValidationReport { violations };
    }

    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for e in &dag.edges {
        indeg[e.dst] += 1;
        outdeg[e.src] += 1;
    }
    if dag.initial_id < n && indeg[dag.initial_id] > 0 {
        violations.push(Violation::InitialHasIncoming);
    }
    if dag.ending_id < n && outdeg[dag.ending_id] > 0 {
        violations.push(Violation::EndingHasOutgoing);
    }
    for id in 0..n {
        if indeg[id] == 0 && id != dag.initial_id {
            violations.push(Violation::ExtraSource { id });
        }
        if outdeg[id] == 0 && id != dag.ending_id {
            violations.push(Violation::ExtraSink { id });
        }
    }

    if dag.topo_order().is_none() {
        violations.push(Violation::Cycle);
    }

    // Undirected connectivity from task 0.
    let mut adj = vec![Vec::new(); n];
    for e in &dag.edges {
        adj[e.src].push(e.dst);
        adj[e.dst].push(e.src);
    }
    let mut reached = vec![false; n];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !reached[w] {
                reached[w] = true;
                stack.push(w);
            }
        }
    }
    let unreached = reached.iter().filter(|&&r| !r).count();
    if unreached > 0 {
        violations.push(Violation::Disconnected { unreached });
    }

    for id in 0..n {
        let is_terminal = id == dag.initial_id || id == dag.ending_id;
        let work = dag.tasks[id].work;
        if is_terminal && work != 0.0 {
            violations.push(Violation::TerminalHasWork { id });
        }
        if !is_terminal && work == 0.0 {
            violations.push(Violation::ZeroWorkOffloadable { id });
        }
    }

    ValidationReport { violations }
}

/// The anchor edges: those leaving the initial task plus those entering the
/// ending task. Their endpoints' placements are partially fixed because
/// terminals cannot be offloaded.
pub fn anchors(dag: &DagApp) -> Result<Vec<Edge>, DagError> {
    let report = validate(dag);
    if !report.is_valid() {
        return Err(DagError::Invalid(report));
    }
    let mut out: Vec<Edge> = dag
        .edges
        .iter()
        .copied()
        .filter(|e| dag.is_anchor_edge(e))
        .collect();
    out.sort();
    Ok(out)
}

/// Payload rule for the edges created by [`augment_with_terminals`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalPayloadRule {
    /// Pure precedence: zero bytes on every new edge.
    Zero,
    /// Each new edge carries a uniform draw from `1..=mem_bytes` of the
    /// offloadable task it touches (0 if that task has no memory footprint).
    UniformUpToMem,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AugmentError {
    #[error("raw graph has no tasks")]
    Empty,
    #[error("raw graph task ids are not dense 0..n")]
    NonDenseIds,
    #[error("raw graph edge references an unknown task")]
    UnknownEndpoint,
    #[error("raw graph contains a cycle")]
    Cyclic,
    #[error("raw graph is not connected")]
    Disconnected,
}

/// Adds the initial and ending terminals to a raw task graph: task 0 gains
/// an edge to every former source, and task `n + 1` an edge from every
/// former sink. All original ids shift up by one. Terminals carry zero work.
pub fn augment_with_terminals(
    raw: &RawDag,
    seed: u64,
    rule: TerminalPayloadRule,
) -> Result<DagApp, AugmentError> {
    let m = raw.tasks.len();
    if m == 0 {
        return Err(AugmentError::Empty);
    }
    if raw.tasks.iter().enumerate().any(|(pos, t)| t.id != pos) {
        return Err(AugmentError::NonDenseIds);
    }
    if raw.edges.iter().any(|e| e.src >= m || e.dst >= m) {
        return Err(AugmentError::UnknownEndpoint);
    }

    let mut indeg = vec![0usize; m];
    let mut outdeg = vec![0usize; m];
    let mut adj = vec![Vec::new(); m];
    for e in &raw.edges {
        indeg[e.dst] += 1;
        outdeg[e.src] += 1;
        adj[e.src].push(e.dst);
        adj[e.dst].push(e.src);
    }

    // Kahn's algorithm for cycle detection.
    let mut deg = indeg.clone();
    let mut queue: Vec<usize> = (0..m).filter(|&i| deg[i] == 0).collect();
    let mut popped = 0;
    let out_adj: Vec<Vec<usize>> = {
        let mut out = vec![Vec::new(); m];
        for e in &raw.edges {
            out[e.src].push(e.dst);
        }
        out
    };
    while let Some(v) = queue.pop() {
        popped += 1;
        for &w in &out_adj[v] {
            deg[w] -= 1;
            if deg[w] == 0 {
                queue.push(w);
            }
        }
    }
    if popped != m {
        return Err(AugmentError::Cyclic);
    }

    if m > 1 {
        let mut reached = vec![false; m];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(AugmentError::Disconnected);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payload = |task: &Task| -> u64 {
        match rule {
            TerminalPayloadRule::Zero => 0,
            TerminalPayloadRule::UniformUpToMem => {
                if task.mem_bytes == 0 {
                    0
                } else {
                    rng.gen_range(1..=task.mem_bytes)
                }
            }
        }
    };

    let ending = m + 1;
    let mut tasks = Vec::with_capacity(m + 2);
    tasks.push(Task::new(0, 0.0, 0));
    for t in &raw.tasks {
        tasks.push(Task::new(t.id + 1, t.work, t.mem_bytes));
    }
    tasks.push(Task::new(ending, 0.0, 0));

    let mut edges: Vec<Edge> = Vec::with_capacity(raw.edges.len() + m);
    for id in 0..m {
        if indeg[id] == 0 {
            edges.push(Edge::new(0, id + 1, payload(&raw.tasks[id])));
        }
    }
    for e in &raw.edges {
        edges.push(Edge::new(e.src + 1, e.dst + 1, e.data_bytes));
    }
    for id in 0..m {
        if outdeg[id] == 0 {
            edges.push(Edge::new(id + 1, ending, payload(&raw.tasks[id])));
        }
    }

    Ok(DagApp { tasks, edges, initial_id: 0, ending_id: ending })
}

/// Whether `d` obeys the one-climb policy on `dag`: no directed path runs
/// edge-placed, then mobile-placed, then edge-placed again. Equivalently,
/// no mobile-placed task has both an offloaded ancestor and an offloaded
/// descendant. Two reachability passes over a topological order.
pub fn one_climb_compliant(dag: &DagApp, d: &OffloadDecision) -> Result<bool, DagError> {
    if d.len() != dag.tasks.len() {
        return Err(DagError::DecisionLength { expected: dag.tasks.len(), found: d.len() });
    }
    let order = dag.topo_order().ok_or_else(|| {
        DagError::Invalid(ValidationReport { violations: vec![Violation::Cycle] })
    })?;
    let n = dag.tasks.len();
    let in_edges = dag.in_edge_index();
    let out_edges = dag.out_edge_index();

    let mut offloaded_ancestor = vec![false; n];
    for &v in &order {
        offloaded_ancestor[v] = in_edges[v]
            .iter()
            .any(|&ei| {
                let p = dag.edges[ei].src;
                d.is_offloaded(p) || offloaded_ancestor[p]
            });
    }
    let mut offloaded_descendant = vec![false; n];
    for &v in order.iter().rev() {
        offloaded_descendant[v] = out_edges[v]
            .iter()
            .any(|&ei| {
                let s = dag.edges[ei].dst;
                d.is_offloaded(s) || offloaded_descendant[s]
            });
    }

    let violating = (0..n).any(|v| {
        !d.is_offloaded(v) && offloaded_ancestor[v] && offloaded_descendant[v]
    });
    Ok(!violating)
}
