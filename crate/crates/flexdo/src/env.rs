//! Hardware environment: device specs, the shared wireless channel, and
//! named presets for the machines used throughout the experiments.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of CPUs on a device.
///
/// `Unlimited` is a distinct variant rather than a large integer so that the
/// CPU scale factor is exactly 1 no matter how many tasks run in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CpuCount {
    Limited(u32),
    Unlimited,
}

impl CpuCount {
    pub fn is_unlimited(self) -> bool {
        matches!(self, CpuCount::Unlimited)
    }
}

impl fmt::Display for CpuCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpuCount::Limited(n) => write!(f, "{n}"),
            CpuCount::Unlimited => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid CPU count {0:?}: expected a positive integer, `inf`, or `unlimited`")]
pub struct ParseCpuCountError(String);

impl FromStr for CpuCount {
    type Err = ParseCpuCountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "unlimited" => Ok(CpuCount::Unlimited),
            t => t
                .parse::<u32>()
                .ok()
                .filter(|&n| n > 0)
                .map(CpuCount::Limited)
                .ok_or_else(|| ParseCpuCountError(s.to_string())),
        }
    }
}

impl Serialize for CpuCount {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            CpuCount::Limited(n) => ser.serialize_u32(*n),
            CpuCount::Unlimited => ser.serialize_str("unlimited"),
        }
    }
}

impl<'de> Deserialize<'de> for CpuCount {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(n) if n > 0 => Ok(CpuCount::Limited(n)),
            Raw::Num(n) => Err(D::Error::custom(format!("CPU count must be positive, got {n}"))),
            Raw::Text(t) => t.parse().map_err(D::Error::custom),
        }
    }
}

/// CPU description of one device: `cpus` CPUs, each running at `clock_hz`
/// cycles/second and retiring `ops_per_cycle` operations per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub cpus: CpuCount,
    pub clock_hz: f64,
    pub ops_per_cycle: f64,
}

impl DeviceSpec {
    pub fn new(cpus: CpuCount, clock_hz: f64, ops_per_cycle: f64) -> Self {
        Self { cpus, clock_hz, ops_per_cycle }
    }

    /// Operations per second when a task has a full CPU to itself.
    pub fn ops_per_sec(&self) -> f64 {
        self.clock_hz * self.ops_per_cycle
    }

    pub fn is_valid(&self) -> bool {
        self.clock_hz > 0.0
            && self.clock_hz.is_finite()
            && self.ops_per_cycle > 0.0
            && self.ops_per_cycle.is_finite()
    }
}

/// The computing cluster the source workload traces were recorded on.
/// Only the per-CPU throughput matters for time rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub clock_hz: f64,
    pub ops_per_cycle: f64,
}

impl ClusterSpec {
    pub fn ops_per_sec(&self) -> f64 {
        self.clock_hz * self.ops_per_cycle
    }
}

/// Mobile device, edge server, and the wireless channel connecting them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub mobile: DeviceSpec,
    pub edge: DeviceSpec,
    /// Channel rate in bytes/second, identical for uplink and downlink.
    #[serde(rename = "channel_rate_bps")]
    pub channel_rate: f64,
}

impl Environment {
    pub fn is_valid(&self) -> bool {
        self.mobile.is_valid()
            && self.edge.is_valid()
            && self.channel_rate > 0.0
            && self.channel_rate.is_finite()
    }
}

/// 1 Mbps expressed in bytes/second.
pub const BYTES_PER_SEC_PER_MBPS: f64 = 125_000.0;

pub fn mbps_to_bytes_per_sec(mbps: f64) -> f64 {
    mbps * BYTES_PER_SEC_PER_MBPS
}

/// Effective single clock for a device with heterogeneous core groups,
/// computed as the core-count-weighted arithmetic mean of the group clocks.
pub fn effective_clock_hz(groups: &[(u32, f64)]) -> f64 {
    let cores: u32 = groups.iter().map(|(n, _)| n).sum();
    let weighted: f64 = groups.iter().map(|(n, hz)| *n as f64 * hz).sum();
    weighted / cores as f64
}

/// Named hardware presets.
pub mod presets {
    use super::*;

    /// Alibaba SCCG5 cluster machine: Intel Xeon Platinum 8163,
    /// 2.5 GHz, 32 FLOPs/cycle.
    pub fn alibaba_sccg5() -> ClusterSpec {
        ClusterSpec { clock_hz: 2.5e9, ops_per_cycle: 32.0 }
    }

    /// Qualcomm Snapdragon 865 smartphone SoC. The heterogeneous core
    /// groups (1x2.84, 3x2.42, 4x1.8 GHz) are collapsed to one effective
    /// clock because the model assumes a single clock per device.
    pub fn snapdragon_865() -> DeviceSpec {
        DeviceSpec {
            cpus: CpuCount::Limited(8),
            clock_hz: effective_clock_hz(&[(1, 2.84e9), (3, 2.42e9), (4, 1.8e9)]),
            ops_per_cycle: 8.0,
        }
    }

    /// Intel Xeon D-2100 edge server: 2.0 GHz, 16 CPUs, 32 FLOPs/cycle.
    pub fn xeon_d2100() -> DeviceSpec {
        DeviceSpec {
            cpus: CpuCount::Limited(16),
            clock_hz: 2.0e9,
            ops_per_cycle: 32.0,
        }
    }

    /// Snapdragon 865 mobile + Xeon D-2100 edge + 20 Mbps channel.
    pub fn default_environment() -> Environment {
        Environment {
            mobile: snapdragon_865(),
            edge: xeon_d2100(),
            channel_rate: mbps_to_bytes_per_sec(20.0),
        }
    }
}
