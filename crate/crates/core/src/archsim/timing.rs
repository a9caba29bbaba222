//! Per-unit cycle counts for one blind-rotation iteration.
//!
//! Each ciphertext passes through rotator, decomposer, FFT, VMA, IFFT and
//! accumulator. Units are fully pipelined, so a core accepts a new ciphertext
//! every initiation interval: the largest per-ciphertext occupancy of any
//! unit. FFT and IFFT share a unit instance count and are reported together.

use serde::{Deserialize, Serialize};

use crate::archsim::config::ArchConfig;
use crate::tfhe::TfheParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Rotator,
    Decomposer,
    Fft,
    Vma,
    Accumulator,
}

impl Unit {
    pub const ALL: [Unit; 5] = [
        Unit::Rotator,
        Unit::Decomposer,
        Unit::Fft,
        Unit::Vma,
        Unit::Accumulator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Unit::Rotator => "rotator",
            Unit::Decomposer => "decomposer",
            Unit::Fft => "fft",
            Unit::Vma => "vma",
            Unit::Accumulator => "accumulator",
        }
    }
}

/// Cycles each unit spends on one ciphertext in one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitCycles {
    pub rotator: u64,
    pub decomposer: u64,
    pub fft: u64,
    pub vma: u64,
    pub accumulator: u64,
}

impl UnitCycles {
    pub fn get(&self, u: Unit) -> u64 {
        match u {
            Unit::Rotator => self.rotator,
            Unit::Decomposer => self.decomposer,
            Unit::Fft => self.fft,
            Unit::Vma => self.vma,
            Unit::Accumulator => self.accumulator,
        }
    }

    pub fn max(&self) -> u64 {
        Unit::ALL.iter().map(|&u| self.get(u)).max().expect("five units")
    }
}

/// Cycles to stream one polynomial through the FFT pipeline.
pub fn fft_cycles_per_poly(params: &TfheParams, arch: &ArchConfig) -> u64 {
    (arch.fft_points(params) / arch.clp) as u64
}

pub fn unit_occupancy(params: &TfheParams, arch: &ArchConfig) -> UnitCycles {
    let polys = (params.k + 1) as u64;
    let digits = polys * params.l_b as u64;
    let colp = arch.colp as u64;
    let per_poly = (params.big_n / arch.lanes()) as u64;
    let fft = digits.div_ceil(arch.plp as u64) * fft_cycles_per_poly(params, arch);
    UnitCycles {
        // one rotate-and-subtract pass per GLWE component
        rotator: polys.div_ceil(colp) * per_poly,
        // l_b digit polynomials out per input polynomial
        decomposer: polys.div_ceil(colp) * params.l_b as u64 * per_poly,
        fft,
        vma: fft,
        accumulator: digits.div_ceil(colp) * per_poly,
    }
}

/// Cycles between consecutive ciphertexts entering a core.
pub fn initiation_interval(params: &TfheParams, arch: &ArchConfig) -> u64 {
    unit_occupancy(params, arch).max()
}

/// Cycles for the first coefficient to travel the whole pipeline: forward
/// and inverse transforms of `log2(points)` stages each, plus one latch per
/// remaining unit.
pub fn pipeline_fill(params: &TfheParams, arch: &ArchConfig) -> u64 {
    let stages = arch.fft_points(params).trailing_zeros() as u64;
    2 * stages * arch.fft_stage_cycles + 4 * arch.unit_latch_cycles
}

/// Cycles for one core to push `core_batch` ciphertexts through one
/// iteration, in isolation.
pub fn iteration_cycles(params: &TfheParams, arch: &ArchConfig, core_batch: usize) -> u64 {
    core_batch as u64 * initiation_interval(params, arch) + pipeline_fill(params, arch)
}

/// One GGSW as streamed from HBM.
pub fn bsk_bytes_per_iteration(params: &TfheParams, arch: &ArchConfig) -> u64 {
    let rows = ((params.k + 1) * params.l_b) as u64;
    rows * (params.k + 1) as u64 * params.big_n as u64 * arch.bsk_bytes_per_coeff as u64
}

/// Cycles to fetch one GGSW at `bandwidth` bytes per second.
pub fn bsk_fetch_cycles(params: &TfheParams, arch: &ArchConfig, bandwidth: f64) -> f64 {
    bsk_bytes_per_iteration(params, arch) as f64 / bandwidth * arch.clock_hz
}
