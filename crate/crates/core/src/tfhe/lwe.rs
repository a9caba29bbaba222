use crate::error::{Error, Result};
use crate::tfhe::params::TfheParams;
use crate::tfhe::rng::TfheRng;
use crate::torus::Modulus;

/// Binary LWE secret key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweSecretKey {
    bits: Vec<u8>,
}

impl LweSecretKey {
    pub fn generate(dim: usize, rng: &mut TfheRng) -> Self {
        LweSecretKey {
            bits: (0..dim).map(|_| rng.binary()).collect(),
        }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("secret key must be binary".into()));
        }
        Ok(LweSecretKey { bits })
    }

    pub fn zero(dim: usize) -> Self {
        LweSecretKey { bits: vec![0; dim] }
    }

    #[inline]
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.bits.len()
    }
}

/// `(a_1..a_n, b)` with `b = <a, s> + e + m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweCiphertext {
    pub mask: Vec<u64>,
    pub body: u64,
    modulus: Modulus,
}

impl LweCiphertext {
    pub fn new(mask: Vec<u64>, body: u64, modulus: Modulus) -> Self {
        let mask = mask.into_iter().map(|a| modulus.reduce(a)).collect();
        LweCiphertext {
            mask,
            body: modulus.reduce(body),
            modulus,
        }
    }

    /// Noiseless encryption of `body` under any key.
    pub fn trivial(dim: usize, body: u64, modulus: Modulus) -> Self {
        LweCiphertext::new(vec![0; dim], body, modulus)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn check(&self, other: &LweCiphertext) -> Result<()> {
        if self.dim() != other.dim() || self.modulus != other.modulus {
            return Err(Error::ShapeMismatch(format!(
                "LWE dimensions {} and {} (or moduli) differ",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &LweCiphertext) -> Result<LweCiphertext> {
        self.check(other)?;
        let q = self.modulus;
        Ok(LweCiphertext {
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| q.add(a, b)).collect(),
            body: q.add(self.body, other.body),
            modulus: q,
        })
    }

    pub fn sub(&self, other: &LweCiphertext) -> Result<LweCiphertext> {
        self.check(other)?;
        let q = self.modulus;
        Ok(LweCiphertext {
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| q.sub(a, b)).collect(),
            body: q.sub(self.body, other.body),
            modulus: q,
        })
    }

    pub fn neg(&self) -> LweCiphertext {
        let q = self.modulus;
        LweCiphertext {
            mask: self.mask.iter().map(|&a| q.neg(a)).collect(),
            body: q.neg(self.body),
            modulus: q,
        }
    }

    pub fn add_constant(&self, c: u64) -> LweCiphertext {
        let mut out = self.clone();
        out.body = self.modulus.add(out.body, c);
        out
    }

    pub fn scalar_mul(&self, k: i64) -> LweCiphertext {
        let q = self.modulus;
        let k = q.from_i64(k);
        LweCiphertext {
            mask: self.mask.iter().map(|&a| q.mul(a, k)).collect(),
            body: q.mul(self.body, k),
            modulus: q,
        }
    }

    /// `b - <a, s>`.
    pub fn phase(&self, key: &LweSecretKey) -> Result<u64> {
        if key.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "key of dimension {} for a ciphertext of dimension {}",
                key.dim(),
                self.dim()
            )));
        }
        let q = self.modulus;
        let dot = self
            .mask
            .iter()
            .zip(key.bits())
            .filter(|(_, &s)| s != 0)
            .fold(0u64, |acc, (&a, _)| acc.wrapping_add(a));
        Ok(q.sub(self.body, q.reduce(dot)))
    }
}

/// Encrypts a raw torus plaintext.
pub fn encrypt_lwe_plaintext(
    plaintext: u64,
    key: &LweSecretKey,
    noise_std: f64,
    modulus: Modulus,
    rng: &mut TfheRng,
) -> LweCiphertext {
    let mask: Vec<u64> = (0..key.dim()).map(|_| rng.uniform(modulus)).collect();
    let dot = mask
        .iter()
        .zip(key.bits())
        .filter(|(_, &s)| s != 0)
        .fold(0u64, |acc, (&a, _)| acc.wrapping_add(a));
    let e = rng.gaussian(noise_std, modulus);
    let body = modulus.add(modulus.add(modulus.reduce(dot), e), modulus.reduce(plaintext));
    LweCiphertext {
        mask,
        body,
        modulus,
    }
}

/// Message encoding with one padding bit: `m -> m * q / 2^(p+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Encoding {
    pub bits: u32,
}

impl Encoding {
    pub fn new(bits: u32) -> Self {
        Encoding { bits }
    }

    pub fn message_space(&self) -> u64 {
        1 << self.bits
    }

    pub fn delta(&self, q: Modulus) -> u64 {
        1u64 << (q.log2() - self.bits - 1)
    }

    pub fn encode(&self, m: u64, q: Modulus) -> Result<u64> {
        if m >= self.message_space() {
            return Err(Error::MessageOutOfRange {
                message: m,
                bits: self.bits,
            });
        }
        Ok(q.mul(m, self.delta(q)))
    }

    /// Rounds a phase to the nearest multiple of `delta`.
    ///
    /// The result lies in `[0, 2^(p+1))`; values `>= 2^p` mean the noise
    /// reached into the padding bit.
    pub fn decode(&self, phase: u64, q: Modulus) -> u64 {
        let shift = q.log2() - self.bits - 1;
        let rounded = if shift == 0 {
            phase
        } else {
            ((phase as u128 + (1u128 << (shift - 1))) >> shift) as u64
        };
        rounded & ((1u64 << (self.bits + 1)) - 1)
    }
}

pub fn encrypt_lwe(
    m: u64,
    encoding: Encoding,
    key: &LweSecretKey,
    params: &TfheParams,
    rng: &mut TfheRng,
) -> Result<LweCiphertext> {
    let q = params.modulus();
    let pt = encoding.encode(m, q)?;
    Ok(encrypt_lwe_plaintext(pt, key, params.lwe_noise_std, q, rng))
}

pub fn decrypt_lwe(c: &LweCiphertext, encoding: Encoding, key: &LweSecretKey) -> Result<u64> {
    Ok(encoding.decode(c.phase(key)?, c.modulus()))
}

/// Booleans as `+q/8` (true) and `-q/8` (false).
pub fn encode_bool(b: bool, q: Modulus) -> u64 {
    let eighth = 1u64 << (q.log2() - 3);
    if b {
        eighth
    } else {
        q.neg(eighth)
    }
}

pub fn encrypt_bool(
    b: bool,
    key: &LweSecretKey,
    params: &TfheParams,
    rng: &mut TfheRng,
) -> LweCiphertext {
    let q = params.modulus();
    encrypt_lwe_plaintext(encode_bool(b, q), key, params.lwe_noise_std, q, rng)
}

pub fn decrypt_bool(c: &LweCiphertext, key: &LweSecretKey) -> Result<bool> {
    let phase = c.phase(key)?;
    Ok(c.modulus().to_i64(phase) > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfhe::params::ParamSet;

    #[test]
    fn zero_noise_round_trip() {
        let params = ParamSet::I.params().noiseless();
        let mut rng = TfheRng::from_seed(1);
        let key = LweSecretKey::generate(params.n, &mut rng);
        let enc = Encoding::new(2);
        let c = encrypt_lwe(0, enc, &key, &params, &mut rng).unwrap();
        assert_eq!(decrypt_lwe(&c, enc, &key).unwrap(), 0);
        assert_eq!(c.phase(&key).unwrap(), 0);
    }

    #[test]
    fn noisy_round_trips_and_zero_add() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(2);
        let key = LweSecretKey::generate(params.n, &mut rng);
        let enc = Encoding::new(3);
        for i in 0..2000u64 {
            let m = i % 8;
            let c = encrypt_lwe(m, enc, &key, &params, &mut rng).unwrap();
            assert_eq!(decrypt_lwe(&c, enc, &key).unwrap(), m);
            let z = encrypt_lwe(0, enc, &key, &params, &mut rng).unwrap();
            assert_eq!(decrypt_lwe(&c.add(&z).unwrap(), enc, &key).unwrap(), m);
        }
    }

    #[test]
    fn message_range_checked() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(3);
        let key = LweSecretKey::generate(params.n, &mut rng);
        let err = encrypt_lwe(4, Encoding::new(2), &key, &params, &mut rng).unwrap_err();
        assert!(matches!(err, Error::MessageOutOfRange { message: 4, bits: 2 }));
    }

    #[test]
    fn booleans() {
        let params = ParamSet::I.params();
        let mut rng = TfheRng::from_seed(4);
        let key = LweSecretKey::generate(params.n, &mut rng);
        for b in [false, true] {
            let c = encrypt_bool(b, &key, &params, &mut rng);
            assert_eq!(decrypt_bool(&c, &key).unwrap(), b);
        }
    }

    #[test]
    fn shape_mismatch() {
        let q = Modulus::Q32;
        let a = LweCiphertext::trivial(3, 0, q);
        let b = LweCiphertext::trivial(4, 0, q);
        assert!(a.add(&b).is_err());
        assert!(a.phase(&LweSecretKey::zero(4)).is_err());
    }
}
