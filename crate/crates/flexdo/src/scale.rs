//! Processing-time rescaling between cluster, edge-server, and mobile
//! hardware. Times scale by the ratio of per-CPU throughputs
//! (clock * ops-per-cycle), so the rescalings compose multiplicatively.

use crate::dag::DagApp;
use crate::env::{ClusterSpec, DeviceSpec, Environment};

/// Cluster-measured time to edge-server time:
/// `t_e = t_c * (f_c * c_c) / (f_e * c_e)`.
pub fn rescale_cluster_to_edge(t_c: f64, cluster: &ClusterSpec, edge: &DeviceSpec) -> f64 {
    t_c * cluster.ops_per_sec() / edge.ops_per_sec()
}

/// Edge-server time to mobile-device time:
/// `t_m = t_e * (f_e * c_e) / (f_m * c_m)`.
pub fn rescale_edge_to_mobile(t_e: f64, edge: &DeviceSpec, mobile: &DeviceSpec) -> f64 {
    t_e * edge.ops_per_sec() / mobile.ops_per_sec()
}

/// Per-task `(mobile, edge)` processing times for a DAG whose tasks carry
/// operation counts calibrated against `cluster`. Each work count is read
/// as a cluster time and rescaled through the edge spec and on to the
/// mobile spec; the result agrees with evaluating the work count directly
/// on either device.
pub fn mobile_processing_profile(
    dag: &DagApp,
    cluster: &ClusterSpec,
    env: &Environment,
) -> Vec<(f64, f64)> {
    dag.tasks
        .iter()
        .map(|t| {
            let t_c = t.work / cluster.ops_per_sec();
            let t_e = rescale_cluster_to_edge(t_c, cluster, &env.edge);
            let t_m = rescale_edge_to_mobile(t_e, &env.edge, &env.mobile);
            (t_m, t_e)
        })
        .collect()
}
