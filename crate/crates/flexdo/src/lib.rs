//! Makespan simulation and offloading decisions for DAG applications split
//! between a mobile device and an edge server.
//!
//! An application is a DAG of tasks bracketed by an initial and an ending
//! terminal pinned to the mobile device. A decision places every other task
//! on the mobile device or the edge server; the simulator evaluates it under
//! processor-sharing CPUs and an evenly shared wireless channel. Solvers
//! range from the two trivial baselines through the FlexDO two-phase
//! heuristic to exhaustive enumeration.

pub mod dag;
pub mod env;
pub mod format;
pub mod gen;
pub mod scale;
pub mod sim;
pub mod solvers;

pub use dag::{
    anchors, augment_with_terminals, one_climb_compliant, validate, DagApp, DagError, Edge,
    OffloadDecision, RawDag, Task, TerminalPayloadRule, ValidationReport, Violation,
};
pub use env::{presets, ClusterSpec, CpuCount, DeviceSpec, Environment};
pub use format::{parse_dag_file, parse_profile, write_dag_file, write_profile, FormatError};
pub use gen::{generate_dag, Dist, GenError, GenParams};
pub use scale::{mobile_processing_profile, rescale_cluster_to_edge, rescale_edge_to_mobile};
pub use sim::{
    cpu_scale_factor, processing_time, rescale_remaining, simulate, simulate_makespan,
    solo_critical_path, trace_to_csv, SimError, SimResult, Simulator, TraceEvent,
};
pub use solvers::{
    adjusted_edge_costs, exhaustive_optimal, exhaustive_optimal_with_cap, flexdo,
    flexdo_phase_one, full_offloading, no_offloading, offloading_gain, relative_gap,
    FlexdoParams, SolveError, SolveOutcome, DEFAULT_EXHAUSTIVE_CAP,
};
