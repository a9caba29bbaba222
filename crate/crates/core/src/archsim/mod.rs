//! Cycle-level performance model of the accelerator.

pub mod config;
pub mod keyswitch;
pub mod reference;
pub mod sim;
pub mod sweep;
pub mod timing;
pub mod workload;

pub use config::{ArchConfig, HbmChannels, SlotPolicy};
pub use keyswitch::{simulate_keyswitch, KeyswitchReport};
pub use sim::{
    required_bandwidth, simulate_pbs_stream, simulate_pbs_stream_traced, IterationTrace, SimReport, TraceRow,
    UnitUtilization,
};
pub use sweep::{sweep_tvlp_clp, SweepRow, DEFAULT_SWEEP_PAIRS};
pub use timing::{
    bsk_bytes_per_iteration, initiation_interval, iteration_cycles, pipeline_fill, unit_occupancy, Unit, UnitCycles,
};
pub use workload::{simulate_workload, LevelReport, WorkloadReport};
