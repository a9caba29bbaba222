use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::Modulus;

/// One TFHE parameter record.
///
/// Noise deviations are fractions of `q`. The `l_k`/`B_k` pair and both
/// deviations are not fixed by the published table; the defaults below are
/// chosen for a comfortable decryption-failure margin and are not normative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfheParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub k: usize,
    pub l_b: usize,
    #[serde(rename = "B_b")]
    pub base_b: u64,
    pub l_k: usize,
    #[serde(rename = "B_k")]
    pub base_k: u64,
    pub log2_q: u32,
    pub lwe_noise_std: f64,
    pub glwe_noise_std: f64,
    pub lambda: u32,
}

impl TfheParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let q = Modulus::from_log2(self.log2_q)?;
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if self.big_n < 4 || !self.big_n.is_power_of_two() {
            return bad(format!("N = {} is not a power of two >= 4", self.big_n));
        }
        if 2 * self.big_n as u128 > 1u128 << q.log2() {
            return bad(format!("2N = {} exceeds q", 2 * self.big_n));
        }
        for (name, base, level) in [
            ("bootstrap", self.base_b, self.l_b),
            ("keyswitch", self.base_k, self.l_k),
        ] {
            if base < 2 || !base.is_power_of_two() {
                return bad(format!("{name} base {base} is not a power of two >= 2"));
            }
            if level == 0 {
                return bad(format!("{name} level must be positive"));
            }
            let bits = level as u64 * base.trailing_zeros() as u64;
            if bits > q.log2() as u64 {
                return bad(format!(
                    "{name} decomposition uses {bits} bits but q has {}",
                    q.log2()
                ));
            }
        }
        for (name, s) in [("lwe", self.lwe_noise_std), ("glwe", self.glwe_noise_std)] {
            if !(0.0..0.5).contains(&s) || s.is_nan() {
                return bad(format!("{name} noise std {s} outside [0, 0.5)"));
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::from_log2(self.log2_q).expect("validated modulus")
    }

    pub fn base_b_log2(&self) -> u32 {
        self.base_b.trailing_zeros()
    }

    pub fn base_k_log2(&self) -> u32 {
        self.base_k.trailing_zeros()
    }

    /// Dimension of the extracted LWE sample, `k*N`.
    pub fn extracted_dim(&self) -> usize {
        self.k * self.big_n
    }

    pub fn ksk_rows(&self) -> usize {
        self.k * self.big_n * self.l_k
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "custom".into())
    }

    /// Same parameters with both noise deviations set to zero.
    pub fn noiseless(&self) -> TfheParams {
        TfheParams {
            lwe_noise_std: 0.0,
            glwe_noise_std: 0.0,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: TfheParams = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Accepts a set name (`I`..`IV`) or a path to a JSON file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match name_or_path.parse::<ParamSet>() {
            Ok(set) => Ok(set.params()),
            Err(_) if Path::new(name_or_path).exists() => Self::load(Path::new(name_or_path)),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamSet {
    I,
    II,
    III,
    IV,
}

impl ParamSet {
    pub const ALL: [ParamSet; 4] = [ParamSet::I, ParamSet::II, ParamSet::III, ParamSet::IV];

    pub fn params(self) -> TfheParams {
        let (n, big_n, l_b, base_b, log2_q, lwe, glwe, lambda) = match self {
            ParamSet::I => (500, 1024, 2, 1 << 8, 32, -15, -25, 110),
            ParamSet::II => (630, 1024, 3, 1 << 7, 32, -17, -27, 128),
            ParamSet::III => (592, 2048, 3, 1 << 7, 32, -17, -27, 128),
            ParamSet::IV => (991, 16384, 2, 1 << 15, 64, -20, -50, 128),
        };
        TfheParams {
            name: Some(self.to_string()),
            n,
            big_n,
            k: 1,
            l_b,
            base_b,
            l_k: 3,
            base_k: 1 << 4,
            log2_q,
            lwe_noise_std: (lwe as f64).exp2(),
            glwe_noise_std: (glwe as f64).exp2(),
            lambda,
        }
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParamSet::I => "I",
            ParamSet::II => "II",
            ParamSet::III => "III",
            ParamSet::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for ParamSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ParamSet::I),
            "II" | "2" => Ok(ParamSet::II),
            "III" | "3" => Ok(ParamSet::III),
            "IV" | "4" => Ok(ParamSet::IV),
            other => Err(Error::InvalidParameter(format!(
                "unknown parameter set {other:?} (expected I, II, III or IV)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        let shapes: Vec<_> = ParamSet::ALL
            .iter()
            .map(|s| {
                let p = s.params();
                (p.n, p.big_n, p.k, p.l_b, p.lambda)
            })
            .collect();
        assert_eq!(
            shapes,
            vec![
                (500, 1024, 1, 2, 110),
                (630, 1024, 1, 3, 128),
                (592, 2048, 1, 3, 128),
                (991, 16384, 1, 2, 128),
            ]
        );
        for s in ParamSet::ALL {
            s.params().validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip_uses_table_names() {
        let p = ParamSet::II.params();
        let text = p.to_json();
        assert!(text.contains("\"N\": 1024"));
        assert!(text.contains("\"l_b\": 3"));
        assert_eq!(TfheParams::from_json(&text).unwrap(), p);
    }

    #[test]
    fn rejects_unknown_fields_and_overflow() {
        let mut v: serde_json::Value = serde_json::from_str(&ParamSet::I.params().to_json()).unwrap();
        v["bogus"] = 1.into();
        assert!(TfheParams::from_json(&v.to_string()).is_err());

        let mut p = ParamSet::I.params();
        p.l_b = 5;
        assert!(p.validate().is_err());
        p = ParamSet::I.params();
        p.base_k = 10;
        assert!(p.validate().is_err());
    }

    #[test]
    fn parses_set_names() {
        assert_eq!("iii".parse::<ParamSet>().unwrap(), ParamSet::III);
        assert!("V".parse::<ParamSet>().is_err());
        assert_eq!(TfheParams::resolve("IV").unwrap().big_n, 16384);
    }
}
