//! Published reference figures the model is checked against.

/// Throughput (PBS/s) for parameter sets I to IV on the default config.
pub const MICROBENCH_THROUGHPUT: [f64; 4] = [74_696.0, 39_600.0, 21_104.0, 2_368.0];
/// PBS latency (seconds) for parameter sets I to IV.
pub const MICROBENCH_LATENCY_S: [f64; 4] = [0.16e-3, 0.23e-3, 0.44e-3, 3.31e-3];
pub const MICROBENCH_THROUGHPUT_TOL: f64 = 0.10;
pub const MICROBENCH_LATENCY_TOL: f64 = 0.15;

/// Set I, folding on over folding off.
pub const FOLDING_THROUGHPUT_RATIO: f64 = 1.99;
pub const FOLDING_LATENCY_RATIO: f64 = 1.68;
pub const FOLDING_THROUGHPUT_TOL: f64 = 0.10;
pub const FOLDING_LATENCY_TOL: f64 = 0.15;

/// Set IV under a 300 GB/s cap, in [`super::DEFAULT_SWEEP_PAIRS`] order.
pub const SWEEP_CAP_BYTES_PER_S: f64 = 300e9;
pub const SWEEP_THROUGHPUT: [f64; 5] = [2368.0, 2368.0, 2364.0, 1240.0, 620.0];
pub const SWEEP_THROUGHPUT_TOL: f64 = 0.10;
/// Required bandwidth at (TvLP, CLP) = (8, 4).
pub const SWEEP_REQUIRED_BANDWIDTH: f64 = 257e9;
pub const SWEEP_BANDWIDTH_TOL: f64 = 0.15;

/// Unit utilization targets for set I with a core batch of three.
pub const UTILIZATION_CORE_BATCH: usize = 3;
pub const UTILIZATION_NUM_CT: usize = 24;
pub const UTILIZATION_MIN_BUSY: f64 = 0.95;
pub const ROTATOR_UTILIZATION: f64 = 0.5;
pub const ROTATOR_UTILIZATION_TOL: f64 = 0.1;
pub const HBM_UTILIZATION: f64 = 0.6;
pub const HBM_UTILIZATION_TOL: f64 = 0.15;

/// NN depths and their PBS counts.
pub const NN_DEPTHS: [usize; 3] = [20, 50, 100];
pub const NN_PBS_COUNTS: [usize; 3] = [2588, 5348, 9948];
