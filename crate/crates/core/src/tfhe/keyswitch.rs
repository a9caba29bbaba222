use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tfhe::decompose::Decomposer;
use crate::tfhe::lwe::{encrypt_lwe_plaintext, LweCiphertext, LweSecretKey};
use crate::tfhe::params::TfheParams;
use crate::tfhe::rng::TfheRng;
use crate::torus::Modulus;

/// `input_dim * level` LWE rows of dimension `output_dim`, stored flat.
///
/// Row `i * level + (j - 1)` encrypts `s_in[i] * q / B^j` under the output key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyswitchKey {
    data: Vec<u64>,
    input_dim: usize,
    output_dim: usize,
    level: usize,
    base_log: u32,
    modulus: Modulus,
}

impl KeyswitchKey {
    pub fn generate(
        input_key: &LweSecretKey,
        output_key: &LweSecretKey,
        params: &TfheParams,
        rng: &TfheRng,
    ) -> Result<Self> {
        let q = params.modulus();
        let dec = Decomposer::new(params.base_k, params.l_k, q)?;
        let level = params.l_k;
        let rows: Vec<Vec<u64>> = input_key
            .bits()
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &bit)| {
                let mut r = rng.split(i as u64);
                (1..=level)
                    .map(|j| {
                        let pt = q.mul(bit as u64, dec.weight(j));
                        let c = encrypt_lwe_plaintext(pt, output_key, params.lwe_noise_std, q, &mut r);
                        let mut row = c.mask;
                        row.push(c.body);
                        row
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(KeyswitchKey {
            data: rows.concat(),
            input_dim: input_key.dim(),
            output_dim: output_key.dim(),
            level,
            base_log: dec.base_log(),
            modulus: q,
        })
    }

    pub fn from_raw(
        data: Vec<u64>,
        input_dim: usize,
        output_dim: usize,
        level: usize,
        base_log: u32,
        modulus: Modulus,
    ) -> Result<Self> {
        if data.len() != input_dim * level * (output_dim + 1) {
            return Err(Error::ShapeMismatch(format!(
                "keyswitch data has {} words, expected {}",
                data.len(),
                input_dim * level * (output_dim + 1)
            )));
        }
        Decomposer::new(1 << base_log, level, modulus)?;
        Ok(KeyswitchKey {
            data,
            input_dim,
            output_dim,
            level,
            base_log,
            modulus,
        })
    }

    pub fn rows(&self) -> usize {
        self.input_dim * self.level
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base_log(&self) -> u32 {
        self.base_log
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn raw(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> LweCiphertext {
        let w = self.output_dim + 1;
        let row = &self.data[r * w..(r + 1) * w];
        LweCiphertext::new(row[..self.output_dim].to_vec(), row[self.output_dim], self.modulus)
    }
}

/// Digits of every mask entry of `c`, `input_dim * level` in total.
pub fn keyswitch_digits(c: &LweCiphertext, ksk: &KeyswitchKey) -> Result<Vec<i64>> {
    let dec = Decomposer::new(1 << ksk.base_log, ksk.level, ksk.modulus)?;
    let mut out = vec![0i64; c.dim() * ksk.level];
    for (a, chunk) in c.mask.iter().zip(out.chunks_mut(ksk.level)) {
        dec.decompose_scalar(*a, chunk);
    }
    Ok(out)
}

/// Moves `c` from the input key to the output key: `(0, b) - sum d * KSK`.
pub fn keyswitch(c: &LweCiphertext, ksk: &KeyswitchKey) -> Result<LweCiphertext> {
    if c.dim() != ksk.input_dim || c.modulus() != ksk.modulus {
        return Err(Error::ShapeMismatch(format!(
            "ciphertext dimension {} does not match keyswitch input dimension {}",
            c.dim(),
            ksk.input_dim
        )));
    }
    let digits = keyswitch_digits(c, ksk)?;
    let w = ksk.output_dim + 1;
    // wrapping arithmetic mod 2^64 is compatible with any power-of-two q
    let mut acc = vec![0u64; w];
    acc[ksk.output_dim] = c.body;
    for (&d, row) in digits.iter().zip(ksk.data.chunks_exact(w)) {
        if d == 0 {
            continue;
        }
        let d = d as u64;
        for (o, &r) in acc.iter_mut().zip(row) {
            *o = o.wrapping_sub(d.wrapping_mul(r));
        }
    }
    let body = acc.pop().expect("body");
    Ok(LweCiphertext::new(acc, body, ksk.modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfhe::lwe::{decrypt_lwe, encrypt_lwe, Encoding};
    use crate::tfhe::params::ParamSet;

    #[test]
    fn shapes_and_zero_input() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(1);
        let s_in = LweSecretKey::generate(64, &mut rng);
        let s_out = LweSecretKey::generate(params.n, &mut rng);
        let ksk = KeyswitchKey::generate(&s_in, &s_out, &params, &rng).unwrap();
        assert_eq!(ksk.rows(), 64 * params.l_k);
        let zero = LweCiphertext::trivial(64, 0, params.modulus());
        assert_eq!(keyswitch_digits(&zero, &ksk).unwrap().len(), 64 * params.l_k);
        let out = keyswitch(&zero, &ksk).unwrap();
        assert_eq!(out.dim(), params.n);
        assert!(out.mask.iter().all(|&a| a == 0) && out.body == 0);
    }

    #[test]
    fn preserves_message() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(2);
        let s_in = LweSecretKey::generate(params.extracted_dim(), &mut rng);
        let s_out = LweSecretKey::generate(params.n, &mut rng);
        let ksk = KeyswitchKey::generate(&s_in, &s_out, &params, &rng.fork()).unwrap();
        let enc = Encoding::new(3);
        let wide = TfheParams { lwe_noise_std: params.glwe_noise_std, ..params.clone() };
        for m in 0..8 {
            let c = encrypt_lwe(m, enc, &s_in, &wide, &mut rng).unwrap();
            let out = keyswitch(&c, &ksk).unwrap();
            assert_eq!(decrypt_lwe(&out, enc, &s_out).unwrap(), m);
        }
    }

    #[test]
    fn rejects_wrong_dimension() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(3);
        let s_in = LweSecretKey::generate(16, &mut rng);
        let s_out = LweSecretKey::generate(8, &mut rng);
        let ksk = KeyswitchKey::generate(&s_in, &s_out, &params, &rng).unwrap();
        assert!(keyswitch(&LweCiphertext::trivial(17, 0, params.modulus()), &ksk).is_err());
    }
}
