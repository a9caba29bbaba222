//! TvLP/CLP trade-off sweep at a fixed lane budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archsim::config::ArchConfig;
use crate::archsim::sim::required_bandwidth_at;
use crate::archsim::timing::{bsk_bytes_per_iteration, initiation_interval, pipeline_fill};
use crate::error::{Error, Result};
use crate::sched::plan_epochs;
use crate::tfhe::TfheParams;

/// TvLP/CLP pairs sharing a 32-lane budget.
pub const DEFAULT_SWEEP_PAIRS: [(usize, usize); 5] = [(16, 2), (8, 4), (4, 8), (2, 16), (1, 32)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub tvlp: usize,
    pub clp: usize,
    pub core_batch: usize,
    pub iteration_period_cycles: u64,
    /// Throughput if HBM never stalls the cores.
    pub compute_throughput_per_s: f64,
    pub pbs_throughput_per_s: f64,
    pub pbs_latency_s: f64,
    /// bsk bytes per second the cores consume at full speed.
    pub bsk_demand_bytes_per_s: f64,
    pub required_bandwidth_bytes_per_s: f64,
    pub memory_bound: bool,
}

/// Evaluates each pair at full device batch. With `cap` set, a pair whose
/// bsk demand exceeds it is throttled by `cap / demand`; its latency is
/// bounded by fetching one GGSW per iteration at `cap`.
pub fn sweep_tvlp_clp(
    params: &TfheParams,
    arch: &ArchConfig,
    pairs: &[(usize, usize)],
    cap: Option<f64>,
) -> Result<Vec<SweepRow>> {
    params.validate()?;
    let Some(&(t0, c0)) = pairs.first() else {
        return Err(Error::InvalidParameter("sweep needs at least one (TvLP, CLP) pair".into()));
    };
    if let Some(&(t, c)) = pairs.iter().find(|&&(t, c)| t * c != t0 * c0) {
        return Err(Error::InvalidParameter(format!(
            "TvLP x CLP must be constant across the sweep: ({t}, {c}) vs ({t0}, {c0})"
        )));
    }
    if let Some(cap) = cap {
        if !(cap > 0.0) {
            return Err(Error::InvalidParameter("bandwidth cap must be positive".into()));
        }
    }
    pairs
        .par_iter()
        .map(|&(tvlp, clp)| {
            let a = ArchConfig {
                tvlp,
                clp,
                ..arch.clone()
            };
            a.validate()?;
            sweep_point(params, &a, cap)
        })
        .collect()
}

fn sweep_point(params: &TfheParams, arch: &ArchConfig, cap: Option<f64>) -> Result<SweepRow> {
    let plan = plan_epochs(1, arch, params)?;
    let cb = plan.core_batch as u64;
    let ii = initiation_interval(params, arch);
    let fill = pipeline_fill(params, arch);
    let n = params.n as f64;
    let clock = arch.clock_hz;
    let period = (cb * ii).max(ii + fill);
    let compute = (arch.tvlp as u64 * cb) as f64 * clock / (n * period as f64);
    let bsk = bsk_bytes_per_iteration(params, arch) as f64;
    let demand = bsk / (period as f64 / clock);
    let (throughput, latency_iter) = match cap {
        Some(cap) => (
            compute * (cap / demand).min(1.0),
            ((ii + fill) as f64).max(bsk / cap * clock),
        ),
        None => (compute, (ii + fill) as f64),
    };
    Ok(SweepRow {
        tvlp: arch.tvlp,
        clp: arch.clp,
        core_batch: plan.core_batch,
        iteration_period_cycles: period,
        compute_throughput_per_s: compute,
        pbs_throughput_per_s: throughput,
        pbs_latency_s: n * latency_iter / clock,
        bsk_demand_bytes_per_s: demand,
        required_bandwidth_bytes_per_s: required_bandwidth_at(params, arch, plan.core_batch),
        memory_bound: cap.is_some_and(|c| demand > c),
    })
}
