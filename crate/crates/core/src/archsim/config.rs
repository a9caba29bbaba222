use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tfhe::TfheParams;

/// HBM channels dedicated to each traffic class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HbmChannels {
    pub bsk: u32,
    pub ksk: u32,
    pub ct: u32,
}

impl HbmChannels {
    pub fn total(&self) -> u32 {
        self.bsk + self.ksk + self.ct
    }
}

/// How a partially filled epoch is charged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotPolicy {
    /// Every epoch streams a full core batch; empty slots still take time.
    #[default]
    FixedSlots,
    /// An epoch streams only as many ciphertexts as its busiest core holds.
    Compact,
}

/// One accelerator instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchConfig {
    /// Cores (test-vector level parallelism).
    #[serde(rename = "TvLP")]
    pub tvlp: usize,
    /// Lanes per FFT unit (coefficient level parallelism).
    #[serde(rename = "CLP")]
    pub clp: usize,
    /// FFT/VMA instance pairs (polynomial level parallelism).
    #[serde(rename = "PLP")]
    pub plp: usize,
    /// Rotator/decomposer/accumulator column instances.
    #[serde(rename = "CoLP")]
    pub colp: usize,
    pub clock_hz: f64,
    pub local_spm_bytes: usize,
    pub global_spm_bytes: usize,
    pub hbm_bytes_per_s: f64,
    pub hbm_channels: HbmChannels,
    pub folding: bool,
    /// Keyswitch cluster lanes and columns per core.
    pub ks_clp: usize,
    pub ks_colp: usize,
    /// Latency of one FFT butterfly stage.
    pub fft_stage_cycles: u64,
    /// Pipeline latch between the other units.
    pub unit_latch_cycles: u64,
    /// Bytes per bootstrapping-key coefficient as streamed from HBM.
    pub bsk_bytes_per_coeff: usize,
    /// Optional cap on ciphertexts per core per iteration.
    pub core_batch: Option<usize>,
    pub policy: SlotPolicy,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig {
            tvlp: 8,
            clp: 4,
            plp: 2,
            colp: 2,
            clock_hz: 1.2e9,
            local_spm_bytes: 655_360,
            global_spm_bytes: 21 << 20,
            hbm_bytes_per_s: 300e9,
            hbm_channels: HbmChannels {
                bsk: 8,
                ksk: 4,
                ct: 4,
            },
            folding: true,
            ks_clp: 8,
            ks_colp: 8,
            fft_stage_cycles: 5,
            unit_latch_cycles: 4,
            bsk_bytes_per_coeff: 8,
            core_batch: None,
            policy: SlotPolicy::FixedSlots,
        }
    }
}

impl ArchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("TvLP", self.tvlp),
            ("CLP", self.clp),
            ("PLP", self.plp),
            ("CoLP", self.colp),
            ("ks_clp", self.ks_clp),
            ("ks_colp", self.ks_colp),
            ("local_spm_bytes", self.local_spm_bytes),
            ("bsk_bytes_per_coeff", self.bsk_bytes_per_coeff),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive")));
        }
        if !(self.clock_hz > 0.0 && self.hbm_bytes_per_s > 0.0) {
            return Err(Error::InvalidParameter("clock and HBM bandwidth must be positive".into()));
        }
        if self.hbm_channels.bsk == 0 || self.hbm_channels.ksk == 0 {
            return Err(Error::InvalidParameter("bsk and ksk need at least one HBM channel".into()));
        }
        Ok(())
    }

    /// Bandwidth of the channels assigned to one traffic class.
    fn share(&self, channels: u32) -> f64 {
        self.hbm_bytes_per_s * channels as f64 / self.hbm_channels.total() as f64
    }

    pub fn bsk_bandwidth(&self) -> f64 {
        self.share(self.hbm_channels.bsk)
    }

    pub fn ksk_bandwidth(&self) -> f64 {
        self.share(self.hbm_channels.ksk)
    }

    /// Lanes seen by coefficient-wise units; folding packs two coefficients
    /// per complex lane.
    pub fn lanes(&self) -> usize {
        if self.folding {
            2 * self.clp
        } else {
            self.clp
        }
    }

    /// Transform length actually run for a degree-`N` polynomial.
    pub fn fft_points(&self, params: &TfheParams) -> usize {
        if self.folding {
            params.big_n / 2
        } else {
            params.big_n
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: ArchConfig = serde_json::from_str(text)?;
        a.validate()?;
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_channel_shares() {
        let a = ArchConfig::default();
        a.validate().unwrap();
        assert_eq!((a.tvlp, a.clp, a.plp, a.colp), (8, 4, 2, 2));
        assert_eq!(a.bsk_bandwidth(), 150e9);
        assert_eq!(a.ksk_bandwidth(), 75e9);
        assert_eq!(a.local_spm_bytes, 640 * 1024);
    }

    #[test]
    fn json_partial_and_strict() {
        let a = ArchConfig::from_json(r#"{"TvLP": 16, "CLP": 2}"#).unwrap();
        assert_eq!((a.tvlp, a.clp, a.plp), (16, 2, 2));
        assert_eq!(ArchConfig::from_json(&a.to_json()).unwrap(), a);
        assert!(ArchConfig::from_json(r#"{"tvlp": 16}"#).is_err());
        assert!(ArchConfig::from_json(r#"{"CLP": 0}"#).is_err());
    }
}
