//! Randomized functional trials behind `strix selftest` and `strix gates`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::GateRow;
use crate::tfhe::{gate_nand, ClientKey, Decomposer, Encoding, LookUpTable, ServerKey, TfheParams, TfheRng};
use crate::torus::{Modulus, TorusPoly};
use crate::transform::{negacyclic_mul_naive, FoldedFft};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub trials: usize,
    pub failures: usize,
}

impl Outcome {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        (self.trials - self.failures) as f64 / self.trials as f64
    }
}

/// Folded-FFT products of balanced base-`2^base_log` digit polynomials with
/// uniform torus polynomials, compared exactly against the schoolbook
/// product. A precision fault counts as a failure.
pub fn fft_oracle(degree: usize, base_log: u32, pairs: usize, seed: u64) -> Result<Outcome> {
    let q = Modulus::Q32;
    let fft = FoldedFft::new(degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 1i64 << (base_log - 1);
    let mut failures = 0;
    for _ in 0..pairs {
        let digits: Vec<i64> = (0..degree).map(|_| rng.random_range(-half..half)).collect();
        let a = TorusPoly::from_signed(&digits, q)?;
        let b = TorusPoly::from_coeffs((0..degree).map(|_| rng.random::<u32>() as u64).collect(), q)?;
        let want = negacyclic_mul_naive(&a, &b)?;
        match fft.negacyclic_mul(&a, &b) {
            Ok(got) if got == want => {}
            Ok(_) | Err(Error::PrecisionFault { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome {
        trials: pairs,
        failures,
    })
}

/// Counts coefficients whose bootstrap-basis reconstruction misses the
/// original by more than `q / B^l` (circular distance).
pub fn decomposition_bound(params: &TfheParams, samples: usize, seed: u64) -> Result<Outcome> {
    let q = params.modulus();
    let dec = Decomposer::new(params.base_b, params.l_b, q)?;
    let bound = 1u128 << (q.log2() - dec.base_log() * params.l_b as u32);
    let mut rng = TfheRng::from_seed(seed);
    let mut digits = vec![0i64; params.l_b];
    let mut failures = 0;
    for _ in 0..samples {
        let a = rng.uniform(q);
        dec.decompose_scalar(a, &mut digits);
        let diff = q.sub(dec.recompose(&digits), a);
        if q.to_i64(diff).unsigned_abs() as u128 > bound {
            failures += 1;
        }
    }
    Ok(Outcome {
        trials: samples,
        failures,
    })
}

/// Encrypts random `bits`-bit messages, bootstraps them through the
/// identity table, keyswitches back and decrypts.
pub fn pbs_identity(client: &ClientKey, server: &ServerKey, bits: u32, trials: usize, seed: u64) -> Result<Outcome> {
    let enc = Encoding::new(bits);
    let lut = LookUpTable::identity(enc);
    let mut rng = TfheRng::from_seed(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let m = rng.below(enc.message_space());
        let c = client.encrypt(m, enc, &mut rng)?;
        let out = server.apply_lut(&c, &lut)?;
        if client.decrypt(&out, enc)? != m {
            failures += 1;
        }
    }
    Ok(Outcome { trials, failures })
}

/// Encrypted NAND over every input pair, `trials` times each.
pub fn nand_truth_table(client: &ClientKey, server: &ServerKey, trials: usize, seed: u64) -> Result<Vec<GateRow>> {
    let mut rng = TfheRng::from_seed(seed);
    let mut rows = Vec::with_capacity(4);
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let expected = !(a && b);
        let mut correct = 0;
        for _ in 0..trials {
            let ca = client.encrypt_bool(a, &mut rng);
            let cb = client.encrypt_bool(b, &mut rng);
            if client.decrypt_bool(&gate_nand(&ca, &cb, server)?)? == expected {
                correct += 1;
            }
        }
        rows.push(GateRow {
            a,
            b,
            expected,
            trials,
            correct,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfhe::ParamSet;

    #[test]
    fn oracle_and_bound_hold() {
        assert_eq!(fft_oracle(64, 8, 20, 1).unwrap().failures, 0);
        for set in ParamSet::ALL {
            assert_eq!(decomposition_bound(&set.params(), 2000, 2).unwrap().failures, 0);
        }
    }

    #[test]
    fn success_rate() {
        let o = Outcome {
            trials: 1000,
            failures: 1,
        };
        assert!((o.success_rate() - 0.999).abs() < 1e-12);
    }
}
