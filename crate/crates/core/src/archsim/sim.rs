//! Iteration-level event simulation of a PBS stream.
//!
//! Each blind-rotation iteration needs one GGSW from HBM. Key fetches are
//! double buffered: fetch `i+1` may start once fetch `i` is done and the
//! buffer used by iteration `i-1` has drained. Iteration `i` starts when its
//! key is on chip, when every core has finished issuing iteration `i-1`, and
//! (inside an epoch) when the first ciphertext's previous-iteration result
//! has left the pipeline.

use serde::{Deserialize, Serialize};

use crate::archsim::config::{ArchConfig, SlotPolicy};
use crate::archsim::keyswitch::{ksk_stream_rate, simulate_keyswitch, KeyswitchReport};
use crate::archsim::timing::{
    bsk_bytes_per_iteration, bsk_fetch_cycles, initiation_interval, pipeline_fill, unit_occupancy,
    Unit, UnitCycles,
};
use crate::error::{Error, Result};
use crate::sched::plan_epochs;
use crate::tfhe::TfheParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitUtilization {
    pub rotator: f64,
    pub decomposer: f64,
    pub fft: f64,
    pub vma: f64,
    pub accumulator: f64,
}

impl UnitUtilization {
    pub fn get(&self, u: Unit) -> f64 {
        match u {
            Unit::Rotator => self.rotator,
            Unit::Decomposer => self.decomposer,
            Unit::Fft => self.fft,
            Unit::Vma => self.vma,
            Unit::Accumulator => self.accumulator,
        }
    }

    fn set(&mut self, u: Unit, v: f64) {
        match u {
            Unit::Rotator => self.rotator = v,
            Unit::Decomposer => self.decomposer = v,
            Unit::Fft => self.fft = v,
            Unit::Vma => self.vma = v,
            Unit::Accumulator => self.accumulator = v,
        }
    }
}

/// Busy cycles of the most loaded core in one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationTrace {
    pub iteration: usize,
    pub epoch: usize,
    pub start_cycle: f64,
    pub fetch_start_cycle: f64,
    pub fetch_cycles: f64,
    pub busy: UnitCycles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimReport {
    pub param_set: String,
    pub num_ct: usize,
    pub core_batch: usize,
    pub device_batch: usize,
    pub epochs: usize,
    pub fragments: usize,
    pub initiation_interval_cycles: u64,
    pub fill_cycles: u64,
    pub bsk_fetch_cycles: f64,
    /// Latency of one ciphertext through all `n` iterations with the key
    /// stream keeping up: `n * (II + fill) / clock`.
    pub pbs_latency_s: f64,
    /// When the first ciphertext of the first epoch completes.
    pub first_completion_s: f64,
    /// Blind-rotation makespan over all epochs.
    pub pbs_time_s: f64,
    /// `pbs_time_s` plus keyswitch time not hidden behind later epochs.
    pub total_time_s: f64,
    /// `num_ct / pbs_time_s`.
    pub pbs_throughput_per_s: f64,
    pub utilization: UnitUtilization,
    pub hbm_utilization: f64,
    pub required_bandwidth_bytes_per_s: f64,
    pub keyswitch: KeyswitchReport,
    /// Iterations of the first epoch (at most `trace_limit` of them).
    pub trace: Vec<IterationTrace>,
}

impl SimReport {
    /// Long-form `(iteration, unit, busy_cycles)` rows, HBM included.
    pub fn trace_rows(&self) -> Vec<TraceRow> {
        let mut rows = Vec::with_capacity(self.trace.len() * 6);
        for t in &self.trace {
            for u in Unit::ALL {
                rows.push(TraceRow {
                    iteration: t.iteration,
                    unit: u.name().into(),
                    start_cycle: t.start_cycle,
                    busy_cycles: t.busy.get(u) as f64,
                });
            }
            rows.push(TraceRow {
                iteration: t.iteration,
                unit: "hbm".into(),
                start_cycle: t.fetch_start_cycle,
                busy_cycles: t.fetch_cycles,
            });
        }
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub unit: String,
    pub start_cycle: f64,
    pub busy_cycles: f64,
}

/// Iterations recorded in [`SimReport::trace`].
pub const DEFAULT_TRACE_LIMIT: usize = 64;

/// Steady-state bandwidth at full core batch: the bsk stream plus the ksk
/// stream of a keyswitch overlapped with it.
pub fn required_bandwidth(params: &TfheParams, arch: &ArchConfig) -> Result<f64> {
    let plan = plan_epochs(1, arch, params)?;
    Ok(required_bandwidth_at(params, arch, plan.core_batch))
}

pub(crate) fn required_bandwidth_at(params: &TfheParams, arch: &ArchConfig, core_batch: usize) -> f64 {
    let ii = initiation_interval(params, arch);
    let fill = pipeline_fill(params, arch);
    let period = (core_batch as u64 * ii).max(ii + fill) as f64 / arch.clock_hz;
    bsk_bytes_per_iteration(params, arch) as f64 / period + ksk_stream_rate(params, arch, core_batch)
}

pub fn simulate_pbs_stream(params: &TfheParams, arch: &ArchConfig, num_ct: usize) -> Result<SimReport> {
    simulate_pbs_stream_traced(params, arch, num_ct, DEFAULT_TRACE_LIMIT)
}

pub fn simulate_pbs_stream_traced(
    params: &TfheParams,
    arch: &ArchConfig,
    num_ct: usize,
    trace_limit: usize,
) -> Result<SimReport> {
    params.validate()?;
    arch.validate()?;
    if num_ct == 0 {
        return Err(Error::InvalidParameter("num_ct must be at least 1".into()));
    }
    let plan = plan_epochs(num_ct, arch, params)?;
    let occ = unit_occupancy(params, arch);
    let ii = initiation_interval(params, arch);
    let fill = pipeline_fill(params, arch);
    let fetch = bsk_fetch_cycles(params, arch, arch.bsk_bandwidth());
    let n = params.n;

    let mut busy = [0f64; 5];
    let mut trace = Vec::new();
    let mut epoch_end = Vec::with_capacity(plan.epochs.len());
    // (start, slots) of the previous two iterations, for buffer reuse
    let mut history: [Option<(f64, u64)>; 2] = [None, None];
    let mut fetch_end = 0f64;
    let mut first_completion = 0f64;
    let mut iteration = 0usize;

    for (e, _) in plan.epochs.iter().enumerate() {
        let loads = plan.core_loads(e);
        let max_load = *loads.iter().max().expect("at least one core") as u64;
        let slots = match arch.policy {
            SlotPolicy::FixedSlots => plan.core_batch as u64,
            SlotPolicy::Compact => max_load,
        };
        let total_load: u64 = loads.iter().map(|&l| l as u64).sum();
        for it in 0..n {
            // double buffering: this fetch reuses the buffer of iteration - 2
            let buffer_free = history[0].map_or(0.0, |(s, sl)| s + (sl * ii + fill) as f64);
            let fetch_start = fetch_end.max(buffer_free);
            fetch_end = fetch_start + fetch;
            let mut start = fetch_end;
            if let Some((prev, prev_slots)) = history[1] {
                start = start.max(prev + (prev_slots * ii) as f64);
                if it > 0 {
                    start = start.max(prev + (ii + fill) as f64);
                }
            }
            for (slot, u) in busy.iter_mut().zip(Unit::ALL) {
                *slot += (total_load * occ.get(u)) as f64;
            }
            if e == 0 && it < trace_limit {
                let per = |c: u64| max_load * c;
                trace.push(IterationTrace {
                    iteration,
                    epoch: e,
                    start_cycle: start,
                    fetch_start_cycle: fetch_start,
                    fetch_cycles: fetch,
                    busy: UnitCycles {
                        rotator: per(occ.rotator),
                        decomposer: per(occ.decomposer),
                        fft: per(occ.fft),
                        vma: per(occ.vma),
                        accumulator: per(occ.accumulator),
                    },
                });
            }
            if e == 0 && it == n - 1 {
                first_completion = start + (ii + fill) as f64;
            }
            history = [history[1], Some((start, slots))];
            iteration += 1;
        }
        let (last_start, last_slots) = history[1].expect("n >= 1");
        epoch_end.push(last_start + (last_slots * ii + fill) as f64);
    }

    let end = *epoch_end.last().expect("at least one epoch");
    let clock = arch.clock_hz;
    let cores = plan.cores as f64;
    let mut utilization = UnitUtilization::default();
    for (b, u) in busy.iter().zip(Unit::ALL) {
        utilization.set(u, b / (cores * end));
    }
    let total_iterations = (plan.epochs.len() * n) as f64;
    let hbm_utilization = total_iterations * fetch / end;

    let epoch_loads: Vec<usize> = (0..plan.epochs.len())
        .map(|e| *plan.core_loads(e).iter().max().expect("cores"))
        .collect();
    let mut keyswitch = simulate_keyswitch(params, arch, &epoch_loads);
    let br_durations: Vec<f64> = epoch_end
        .iter()
        .enumerate()
        .map(|(e, &t)| (t - if e == 0 { 0.0 } else { epoch_end[e - 1] }) / clock)
        .collect();
    keyswitch.exposed_s = keyswitch
        .epoch_times_s
        .iter()
        .enumerate()
        .map(|(e, &ks)| match br_durations.get(e + 1) {
            Some(&next) => (ks - next).max(0.0),
            None => ks,
        })
        .sum();

    let pbs_time_s = end / clock;
    Ok(SimReport {
        param_set: params.label(),
        num_ct,
        core_batch: plan.core_batch,
        device_batch: plan.device_batch,
        epochs: plan.epochs.len(),
        fragments: plan.fragments(),
        initiation_interval_cycles: ii,
        fill_cycles: fill,
        bsk_fetch_cycles: fetch,
        pbs_latency_s: (n as u64 * (ii + fill)) as f64 / clock,
        first_completion_s: first_completion / clock,
        pbs_time_s,
        total_time_s: pbs_time_s + keyswitch.exposed_s,
        pbs_throughput_per_s: num_ct as f64 / pbs_time_s,
        utilization,
        hbm_utilization,
        required_bandwidth_bytes_per_s: required_bandwidth_at(params, arch, plan.core_batch),
        keyswitch,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfhe::ParamSet;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn set_one_full_batch() {
        let r = simulate_pbs_stream(&ParamSet::I.params(), &ArchConfig::default(), 640).unwrap();
        assert_eq!((r.epochs, r.fragments, r.core_batch), (1, 0, 80));
        assert!(close(r.pbs_throughput_per_s, 75_000.0, 0.001), "{}", r.pbs_throughput_per_s);
        assert!(close(r.pbs_latency_s, 500.0 * 362.0 / 1.2e9, 1e-12));
        assert!(r.total_time_s > r.pbs_time_s);
        assert_eq!(r.trace.len(), DEFAULT_TRACE_LIMIT);
    }

    #[test]
    fn deterministic() {
        let p = ParamSet::III.params();
        let a = simulate_pbs_stream(&p, &ArchConfig::default(), 777).unwrap();
        let b = simulate_pbs_stream(&p, &ArchConfig::default(), 777).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn utilization_bounded() {
        for set in ParamSet::ALL {
            for num_ct in [1, 7, 100, 1000] {
                let r = simulate_pbs_stream(&set.params(), &ArchConfig::default(), num_ct).unwrap();
                for u in Unit::ALL {
                    let v = r.utilization.get(u);
                    assert!((0.0..=1.0 + 1e-12).contains(&v), "{set} {num_ct} {u:?} {v}");
                }
                assert!(r.hbm_utilization <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn compact_policy_charges_partial_epochs_less() {
        let p = ParamSet::I.params();
        let fixed = simulate_pbs_stream(&p, &ArchConfig::default(), 641).unwrap();
        let compact = simulate_pbs_stream(
            &p,
            &ArchConfig {
                policy: SlotPolicy::Compact,
                ..ArchConfig::default()
            },
            641,
        )
        .unwrap();
        assert!(compact.pbs_time_s < 0.6 * fixed.pbs_time_s);
    }

    #[test]
    fn hidden_keyswitch_between_epochs() {
        let p = ParamSet::I.params();
        let one = simulate_pbs_stream(&p, &ArchConfig::default(), 640).unwrap();
        let two = simulate_pbs_stream(&p, &ArchConfig::default(), 1280).unwrap();
        // the first epoch's keyswitch hides behind the second blind rotation
        assert!(close(two.keyswitch.exposed_s, one.keyswitch.exposed_s, 1e-9));
    }

    #[test]
    fn rejects_empty_stream() {
        assert!(simulate_pbs_stream(&ParamSet::I.params(), &ArchConfig::default(), 0).is_err());
    }
}
