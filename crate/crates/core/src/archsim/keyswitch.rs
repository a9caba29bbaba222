//! Keyswitch cluster model: a `ks_clp x ks_colp` multiply-accumulate array
//! per core sweeping the `kN*l_k x (n+1)` key matrix once per ciphertext,
//! while the key itself streams from HBM over the ksk channels.

use serde::{Deserialize, Serialize};

use crate::archsim::config::ArchConfig;
use crate::tfhe::TfheParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyswitchReport {
    pub ksk_bytes: u64,
    pub cycles_per_ct: u64,
    /// Standalone keyswitch time of each epoch.
    pub epoch_times_s: Vec<f64>,
    /// Portion not hidden behind the following epoch's blind rotation.
    pub exposed_s: f64,
}

impl KeyswitchReport {
    pub fn standalone_s(&self) -> f64 {
        self.epoch_times_s.iter().sum()
    }
}

pub fn ksk_bytes(params: &TfheParams) -> u64 {
    (params.ksk_rows() * (params.n + 1) * params.modulus().bytes_per_coeff()) as u64
}

/// Cluster cycles for one ciphertext.
pub fn keyswitch_cycles_per_ct(params: &TfheParams, arch: &ArchConfig) -> u64 {
    let rows = params.ksk_rows() as u64;
    let cols = (params.n + 1) as u64;
    rows.div_ceil(arch.ks_clp as u64) * cols.div_ceil(arch.ks_colp as u64)
}

/// Time for one core to keyswitch `load` ciphertexts; the key is multicast,
/// so cores in the same epoch share one stream.
pub fn keyswitch_time(params: &TfheParams, arch: &ArchConfig, load: usize) -> f64 {
    if load == 0 {
        return 0.0;
    }
    let compute = (load as u64 * keyswitch_cycles_per_ct(params, arch)) as f64 / arch.clock_hz;
    let stream = ksk_bytes(params) as f64 / arch.ksk_bandwidth();
    compute.max(stream)
}

/// Rate the ksk channels are drawn on while a full-batch keyswitch runs.
pub fn ksk_stream_rate(params: &TfheParams, arch: &ArchConfig, core_batch: usize) -> f64 {
    ksk_bytes(params) as f64 / keyswitch_time(params, arch, core_batch.max(1))
}

/// Standalone keyswitch times for per-epoch maximum core loads. `exposed_s`
/// assumes nothing overlaps; the stream simulator fills in the real value.
pub fn simulate_keyswitch(params: &TfheParams, arch: &ArchConfig, epoch_loads: &[usize]) -> KeyswitchReport {
    let epoch_times_s: Vec<f64> = epoch_loads
        .iter()
        .map(|&l| keyswitch_time(params, arch, l))
        .collect();
    KeyswitchReport {
        ksk_bytes: ksk_bytes(params),
        cycles_per_ct: keyswitch_cycles_per_ct(params, arch),
        exposed_s: epoch_times_s.iter().sum(),
        epoch_times_s,
    }
}
