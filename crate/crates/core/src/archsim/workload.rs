//! Whole-workload time: nonlinear levels run back to back, each as its own
//! PBS stream including its final keyswitch.

use serde::{Deserialize, Serialize};

use crate::archsim::config::ArchConfig;
use crate::archsim::sim::simulate_pbs_stream_traced;
use crate::error::Result;
use crate::sched::WorkloadGraph;
use crate::tfhe::TfheParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelReport {
    pub level: usize,
    pub pbs: usize,
    pub epochs: usize,
    pub time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadReport {
    pub param_set: String,
    pub pbs_count: usize,
    pub total_time_s: f64,
    pub levels: Vec<LevelReport>,
}

pub fn simulate_workload(graph: &WorkloadGraph, params: &TfheParams, arch: &ArchConfig) -> Result<WorkloadReport> {
    let counts = graph.nonlinear_levels()?;
    let mut levels = Vec::with_capacity(counts.len());
    for (level, &pbs) in counts.iter().enumerate() {
        if pbs == 0 {
            continue;
        }
        let r = simulate_pbs_stream_traced(params, arch, pbs, 0)?;
        levels.push(LevelReport {
            level,
            pbs,
            epochs: r.epochs,
            // the last epoch's keyswitch is always exposed
            time_s: r.total_time_s,
        });
    }
    Ok(WorkloadReport {
        param_set: params.label(),
        pbs_count: graph.pbs_count(),
        total_time_s: levels.iter().map(|l| l.time_s).sum(),
        levels,
    })
}
