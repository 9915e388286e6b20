//! Seeded synthetic DAG generation in the style of cluster-trace batch
//! jobs: layered task graphs with a controllable size band, work and memory
//! distributions, and incoming-edge payloads bounded by each task's data
//! structure size.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dag::{augment_with_terminals, DagApp, Edge, RawDag, Task, TerminalPayloadRule};

/// Sampling distribution for task work and memory draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
}

impl Dist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Dist::Constant(v) => v,
            Dist::Uniform { lo, hi } => rng.gen_range(lo..=hi),
            Dist::LogUniform { lo, hi } => {
                let x = rng.gen_range(lo.ln()..=hi.ln());
                x.exp()
            }
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Dist::Constant(v) => v.is_finite() && v >= 0.0,
            Dist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi,
            Dist::LogUniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi,
        }
    }
}

/// Generator knobs. Defaults produce 18-28-task DAGs whose processing and
/// transmission times are of comparable magnitude on the preset hardware.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Inclusive range of offloadable task counts.
    pub n_tasks: (usize, usize),
    /// Largest number of tasks per layer.
    pub max_layer_width: usize,
    /// Probability of an extra forward edge between any cross-layer pair.
    pub extra_edge_prob: f64,
    /// Operation count per task.
    pub work_ops: Dist,
    /// Data structure size per task, bytes.
    pub mem_bytes: Dist,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_tasks: (18, 28),
            max_layer_width: 5,
            extra_edge_prob: 0.1,
            work_ops: Dist::LogUniform { lo: 8e10, hi: 1.6e12 },
            mem_bytes: Dist::LogUniform { lo: 2e6, hi: 2e8 },
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_tasks(mut self, lo: usize, hi: usize) -> Self {
        self.n_tasks = (lo, hi);
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}

/// Generates one application DAG. The same parameters and seed always
/// produce the identical DAG.
pub fn generate_dag(params: &GenParams) -> Result<DagApp, GenError> {
    let (lo, hi) = params.n_tasks;
    if lo < 1 || lo > hi {
        return Err(GenError::Infeasible(format!("task count range [{lo}, {hi}] is empty")));
    }
    if params.max_layer_width < 1 {
        return Err(GenError::Infeasible("max_layer_width must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&params.extra_edge_prob) {
        return Err(GenError::Infeasible("extra_edge_prob must lie in [0, 1]".into()));
    }
    if !params.work_ops.is_valid() || !params.mem_bytes.is_valid() {
        return Err(GenError::Infeasible("work/mem distribution bounds are invalid".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(lo..=hi);

    // Assign tasks to layers; at least two layers whenever possible so the
    // raw graph can be connected by forward edges alone.
    let mut layer_of = vec![0usize; n];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    {
        let mut next = 0usize;
        while next < n {
            let mut width = rng.gen_range(1..=params.max_layer_width).min(n - next);
            if layers.is_empty() && width == n && n >= 2 {
                width = n - 1;
            }
            let layer: Vec<usize> = (next..next + width).collect();
            for &t in &layer {
                layer_of[t] = layers.len();
            }
            next += width;
            layers.push(layer);
        }
    }

    let mut edge_set: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();

    // Every task below the top layer gets one parent, biased to the layer
    // directly above it.
    for t in 0..n {
        let l = layer_of[t];
        if l == 0 {
            continue;
        }
        let parent_layer = if l == 1 || rng.gen_bool(0.75) { l - 1 } else { rng.gen_range(0..l - 1) };
        let choices = &layers[parent_layer];
        let parent = choices[rng.gen_range(0..choices.len())];
        edge_set.insert((parent, t));
    }

    // Childless first-layer tasks hook into the second layer.
    if layers.len() >= 2 {
        let childless: Vec<usize> = layers[0]
            .iter()
            .copied()
            .filter(|&t| !edge_set.iter().any(|&(s, _)| s == t))
            .collect();
        for t in childless {
            let choices = &layers[1];
            let child = choices[rng.gen_range(0..choices.len())];
            edge_set.insert((t, child));
        }
    }

    // Merge any remaining undirected components into the one holding task 0.
    loop {
        let comp = component_ids(n, &edge_set);
        let Some(&other) = comp.iter().find(|&&c| c != comp[0]) else {
            break;
        };
        let u = (0..n)
            .find(|&t| comp[t] == comp[0] && layer_of[t] == 0)
            .expect("component of task 0 reaches layer 0");
        let v = (0..n)
            .find(|&t| comp[t] == other && layer_of[t] > 0)
            .expect("every component has a task above layer 0");
        edge_set.insert((u, v));
    }

    // Extra forward edges across layers.
    for u in 0..n {
        for v in 0..n {
            if layer_of[u] < layer_of[v] && rng.gen_bool(params.extra_edge_prob) {
                edge_set.insert((u, v));
            }
        }
    }

    let tasks: Vec<Task> = (0..n)
        .map(|id| {
            let work = params.work_ops.sample(&mut rng).max(1.0);
            let mem = params.mem_bytes.sample(&mut rng).round().max(1.0) as u64;
            Task::new(id, work, mem)
        })
        .collect();
    let edges: Vec<Edge> = edge_set.iter().map(|&(s, d)| Edge::new(s, d, 0)).collect();
    let raw = RawDag { tasks, edges };

    let mut dag = augment_with_terminals(&raw, 0, TerminalPayloadRule::Zero)
        .expect("layered construction is acyclic and connected");
    assign_payloads(&mut dag, &mut rng);
    Ok(dag)
}

/// Draws the incoming payload total of every non-terminal task uniformly
/// from `1..=mem_bytes` and splits it across the incoming edges with a
/// uniform random composition. Edges into the ending task carry a uniform
/// draw bounded by the producing task's memory size.
fn assign_payloads(dag: &mut DagApp, rng: &mut ChaCha8Rng) {
    let in_edges = dag.in_edge_index();
    for v in 0..dag.tasks.len() {
        if dag.is_terminal(v) || in_edges[v].is_empty() {
            continue;
        }
        let mem = dag.tasks[v].mem_bytes.max(1);
        let total = rng.gen_range(1..=mem);
        let shares: Vec<f64> = (0..in_edges[v].len()).map(|_| rng.gen_range(0.01..1.0)).collect();
        let mut prefix = Vec::with_capacity(shares.len());
        let mut acc = 0.0;
        for s in &shares {
            acc += s;
            prefix.push(acc);
        }
        let sum = acc;
        let mut last_boundary = 0u64;
        for (k, &ei) in in_edges[v].iter().enumerate() {
            let boundary = if k + 1 == in_edges[v].len() {
                total
            } else {
                ((total as f64) * (prefix[k] / sum)).round() as u64
            };
            let boundary = boundary.clamp(last_boundary, total);
            dag.edges[ei].data_bytes = boundary - last_boundary;
            last_boundary = boundary;
        }
    }
    for ei in 0..dag.edges.len() {
        if dag.edges[ei].dst == dag.ending_id {
            let mem = dag.tasks[dag.edges[ei].src].mem_bytes.max(1);
            dag.edges[ei].data_bytes = rng.gen_range(1..=mem);
        }
    }
}

fn component_ids(n: usize, edges: &std::collections::BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..n).collect();
    // Union-find with path halving.
    fn find(comp: &mut Vec<usize>, mut x: usize) -> usize {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    }
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
        if ru != rv {
            let (lo, hi) = (ru.min(rv), ru.max(rv));
            comp[hi] = lo;
        }
    }
    (0..n).map(|x| find(&mut comp, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::validate;

    #[test]
    fn generated_dags_validate() {
        for seed in 0..25 {
            let dag = generate_dag(&GenParams::default().with_seed(seed)).unwrap();
            let report = validate(&dag);
            assert!(report.is_valid(), "seed {seed}: {report}");
            let n = dag.n_offloadable();
            assert!((18..=28).contains(&n), "seed {seed} produced N = {n}");
        }
    }

    #[test]
    fn same_seed_reproduces_the_same_dag() {
        let p = GenParams::default().with_seed(42);
        let a = generate_dag(&p).unwrap();
        let b = generate_dag(&p).unwrap();
        assert_eq!(a, b);
        let c = generate_dag(&GenParams::default().with_seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn incoming_payload_totals_respect_memory_bounds() {
        for seed in 0..10 {
            let dag = generate_dag(&GenParams::default().with_seed(seed)).unwrap();
            let in_edges = dag.in_edge_index();
            for v in dag.offloadable_ids() {
                let total: u64 = in_edges[v].iter().map(|&ei| dag.edges[ei].data_bytes).sum();
                assert!(total >= 1, "seed {seed} task {v} receives no data");
                assert!(
                    total <= dag.tasks[v].mem_bytes,
                    "seed {seed} task {v}: {total} bytes exceed mem {}",
                    dag.tasks[v].mem_bytes
                );
            }
        }
    }

    #[test]
    fn task_count_histogram_covers_the_band_and_density_humps() {
        let mut task_counts = vec![0usize; 29];
        let mut density_bins = [0usize; 10];
        for seed in 0..1000 {
            let dag = generate_dag(&GenParams::default().with_seed(seed)).unwrap();
            let n = dag.n_offloadable();
            task_counts[n] += 1;
            let offloadable_edges = dag
                .edges
                .iter()
                .filter(|e| !dag.is_anchor_edge(e))
                .count();
            let density = offloadable_edges as f64 / (n * (n - 1) / 2) as f64;
            let bin = ((density * 10.0) as usize).min(9);
            density_bins[bin] += 1;
        }
        for n in 18..=28 {
            assert!(task_counts[n] > 0, "no draws with {n} tasks");
        }
        // Densities concentrate away from the extremes.
        let peak = density_bins.iter().copied().max().unwrap();
        assert!(density_bins[0] < peak, "density histogram peaks at the lowest bin: {density_bins:?}");
        assert!(density_bins[9] < peak, "density histogram peaks at the highest bin: {density_bins:?}");
        assert_eq!(density_bins[9], 0, "complete graphs should not occur: {density_bins:?}");
    }

    #[test]
    fn infeasible_params_are_rejected() {
        let mut p = GenParams::default();
        p.n_tasks = (10, 5);
        assert!(matches!(generate_dag(&p), Err(GenError::Infeasible(_))));
        let mut p = GenParams::default();
        p.extra_edge_prob = 1.5;
        assert!(matches!(generate_dag(&p), Err(GenError::Infeasible(_))));
        let mut p = GenParams::default();
        p.work_ops = Dist::LogUniform { lo: 0.0, hi: 1.0 };
        assert!(matches!(generate_dag(&p), Err(GenError::Infeasible(_))));
    }

    #[test]
    fn single_task_band_generates_a_chain() {
        let p = GenParams::default().with_n_tasks(1, 1).with_seed(7);
        let dag = generate_dag(&p).unwrap();
        assert_eq!(dag.tasks.len(), 3);
        assert!(validate(&dag).is_valid());
    }
}
