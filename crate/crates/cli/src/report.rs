//! JSON report schema. Bump `FORMAT` on any incompatible change.

use serde::Serialize;

use nnverify::{CellStatus, IntervalBox, PartitionCell, Stats, Status, Verdict, WorkItem};

pub const FORMAT: u32 = 1;

pub type Bounds = Vec<[f64; 2]>;

pub fn bounds(b: &IntervalBox<f64>) -> Bounds {
    b.dims().iter().map(|iv| [iv.lo(), iv.hi()]).collect()
}

#[derive(Debug, Serialize)]
pub struct BoxPair {
    pub input: Bounds,
    pub output: Bounds,
    pub depth: usize,
}

impl From<&WorkItem<f64>> for BoxPair {
    fn from(item: &WorkItem<f64>) -> Self {
        Self {
            input: bounds(item.input()),
            output: bounds(item.output()),
            depth: item.depth(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsReport {
    pub boxes_processed: u64,
    pub boxes_proven_safe: u64,
    pub bisections: u64,
    pub max_depth: usize,
    pub wall_time: f64,
}

impl From<&Stats> for StatsReport {
    fn from(s: &Stats) -> Self {
        Self {
            boxes_processed: s.boxes_processed,
            boxes_proven_safe: s.boxes_proven_safe,
            bisections: s.bisections,
            max_depth: s.max_depth,
            wall_time: s.wall_time.as_secs_f64(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictReport {
    pub status: &'static str,
    pub witnesses: Vec<BoxPair>,
    pub stats: StatsReport,
}

impl From<&Verdict<f64>> for VerdictReport {
    fn from(v: &Verdict<f64>) -> Self {
        Self {
            status: match v.status {
                Status::Safe => "safe",
                Status::Uncertain => "uncertain",
            },
            witnesses: v.witnesses.iter().map(BoxPair::from).collect(),
            stats: StatsReport::from(&v.stats),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PartitionEntry {
    pub input: Bounds,
    pub output: Bounds,
    pub status: &'static str,
}

impl From<&PartitionCell<f64>> for PartitionEntry {
    fn from(c: &PartitionCell<f64>) -> Self {
        Self {
            input: bounds(c.item.input()),
            output: bounds(c.item.output()),
            status: match c.status {
                CellStatus::Safe => "safe",
                CellStatus::Witness => "witness",
                CellStatus::Pending => "pending",
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Echo of the inputs a run was configured with.
#[derive(Debug, Default, Serialize)]
pub struct RunConfig {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    pub epsilon: f64,
    pub mode: &'static str,
    pub fail_fast: bool,
    pub jobs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    pub input: Bounds,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub format: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub verdict: VerdictReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<PartitionEntry>>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(command: &'static str, config: RunConfig, verdict: &Verdict<f64>, wall_seconds: f64) -> Self {
        Self {
            format: FORMAT,
            command,
            config,
            verdict: VerdictReport::from(verdict),
            partition: verdict
                .partition
                .as_ref()
                .map(|cells| cells.iter().map(PartitionEntry::from).collect()),
            timing: Timing { wall_seconds },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundReport {
    pub format: u32,
    pub command: &'static str,
    pub model: String,
    pub input: Bounds,
    pub output: Bounds,
    pub gamma: f64,
    pub xi: f64,
    pub per_layer_norms: Vec<f64>,
    pub input_width: f64,
    pub output_width: f64,
    pub excess_width_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_hull: Option<Bounds>,
}

#[derive(Debug, Serialize)]
pub struct GenReport {
    pub format: u32,
    pub command: &'static str,
    pub files: Vec<String>,
}
