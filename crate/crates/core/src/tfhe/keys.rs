//! Key generation, client/server key bundles and the binary key format.
//!
//! The layout is documented in `docs/key-format.md`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::tfhe::bootstrap::{pbs, pbs_with_test_vector, BootstrappingKey, LookUpTable};
use crate::tfhe::glwe::{GgswCiphertext, GlweCiphertext, GlweSecretKey};
use crate::tfhe::keyswitch::{keyswitch, KeyswitchKey};
use crate::tfhe::lwe::{
    decrypt_bool, decrypt_lwe, encrypt_bool, encrypt_lwe, Encoding, LweCiphertext, LweSecretKey,
};
use crate::tfhe::params::TfheParams;
use crate::tfhe::rng::TfheRng;
use crate::torus::{Modulus, TorusPoly};
use crate::transform::FoldedFft;

/// Secret material: encrypts and decrypts.
#[derive(Clone, Debug, PartialEq)]
pub struct ClientKey {
    pub params: TfheParams,
    pub lwe: LweSecretKey,
    pub glwe: GlweSecretKey,
}

impl ClientKey {
    pub fn encrypt(&self, m: u64, enc: Encoding, rng: &mut TfheRng) -> Result<LweCiphertext> {
        encrypt_lwe(m, enc, &self.lwe, &self.params, rng)
    }

    /// Decrypts a ciphertext under the LWE key (dimension `n`).
    pub fn decrypt(&self, c: &LweCiphertext, enc: Encoding) -> Result<u64> {
        decrypt_lwe(c, enc, &self.lwe)
    }

    /// Decrypts a bootstrapped, not yet keyswitched, ciphertext (dimension `k*N`).
    pub fn decrypt_extracted(&self, c: &LweCiphertext, enc: Encoding) -> Result<u64> {
        decrypt_lwe(c, enc, &self.glwe.flatten())
    }

    pub fn encrypt_bool(&self, b: bool, rng: &mut TfheRng) -> LweCiphertext {
        encrypt_bool(b, &self.lwe, &self.params, rng)
    }

    pub fn decrypt_bool(&self, c: &LweCiphertext) -> Result<bool> {
        decrypt_bool(c, &self.lwe)
    }
}

/// Public evaluation material: bootstrapping and keyswitching keys.
#[derive(Clone, Debug)]
pub struct ServerKey {
    pub params: TfheParams,
    pub bsk: BootstrappingKey,
    pub ksk: KeyswitchKey,
    fft: FoldedFft,
}

impl ServerKey {
    pub fn new(params: TfheParams, bsk: BootstrappingKey, ksk: KeyswitchKey) -> Result<Self> {
        params.validate()?;
        let fft = FoldedFft::new(params.big_n)?;
        let bsk = if bsk.spectral().is_none() && params.log2_q <= 32 {
            bsk.with_spectral(&fft)?
        } else {
            bsk
        };
        Ok(ServerKey {
            params,
            bsk,
            ksk,
            fft,
        })
    }

    pub fn fft(&self) -> &FoldedFft {
        &self.fft
    }

    /// Bootstrap only; the result is under the flattened GLWE key.
    pub fn pbs(&self, c: &LweCiphertext, lut: &LookUpTable) -> Result<LweCiphertext> {
        pbs(c, lut, &self.bsk, &self.params, &self.fft)
    }

    pub fn pbs_with_test_vector(&self, c: &LweCiphertext, tv: &TorusPoly) -> Result<LweCiphertext> {
        pbs_with_test_vector(c, tv, &self.bsk, &self.params, &self.fft)
    }

    pub fn keyswitch(&self, c: &LweCiphertext) -> Result<LweCiphertext> {
        keyswitch(c, &self.ksk)
    }

    /// Bootstrap followed by keyswitch, back under the LWE key.
    pub fn apply_lut(&self, c: &LweCiphertext, lut: &LookUpTable) -> Result<LweCiphertext> {
        self.keyswitch(&self.pbs(c, lut)?)
    }
}

/// Generates all keys deterministically from `seed`.
pub fn keygen(params: &TfheParams, seed: u64) -> Result<(ClientKey, ServerKey)> {
    params.validate()?;
    let mut master = TfheRng::from_seed(seed);
    let mut lwe_rng = master.fork();
    let mut glwe_rng = master.fork();
    let bsk_rng = master.fork();
    let ksk_rng = master.fork();

    let lwe = LweSecretKey::generate(params.n, &mut lwe_rng);
    let glwe = GlweSecretKey::generate(params.k, params.big_n, &mut glwe_rng);
    let fft = FoldedFft::new(params.big_n)?;
    let bsk = BootstrappingKey::generate(&lwe, &glwe, params, &bsk_rng, Some(&fft))?;
    let ksk = KeyswitchKey::generate(&glwe.flatten(), &lwe, params, &ksk_rng)?;
    let server = ServerKey::new(params.clone(), bsk, ksk)?;
    let client = ClientKey {
        params: params.clone(),
        lwe,
        glwe,
    };
    Ok((client, server))
}

const MAGIC: &[u8; 8] = b"STRXKEY\0";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
enum Kind {
    LweSecret = 1,
    GlweSecret = 2,
    Bootstrapping = 3,
    Keyswitch = 4,
}

/// Length-prefixed little-endian key serialization.
pub trait KeyCodec: Sized {
    fn write_to<W: Write>(&self, w: &mut W) -> Result<()>;
    fn read_from<R: Read>(r: &mut R) -> Result<Self>;

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        let v = Self::read_from(&mut bytes)?;
        if !bytes.is_empty() {
            return Err(Error::KeyFormat(format!("{} trailing bytes", bytes.len())));
        }
        Ok(v)
    }
}

fn write_header<W: Write>(w: &mut W, kind: Kind, log2_q: u32) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(kind as u32).to_le_bytes())?;
    w.write_all(&log2_q.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_len<R: Read>(r: &mut R) -> Result<usize> {
    let v = read_u64(r)?;
    // guards against absurd allocations from corrupted input
    if v > 1 << 32 {
        return Err(Error::KeyFormat(format!("length field {v} is implausible")));
    }
    Ok(v as usize)
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_header_raw<R: Read>(r: &mut R, expected: Kind) -> Result<u32> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::KeyFormat("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::KeyFormat(format!("unsupported version {version}")));
    }
    let kind = read_u32(r)?;
    if kind != expected as u32 {
        return Err(Error::KeyFormat(format!(
            "expected key kind {}, found {kind}",
            expected as u32
        )));
    }
    read_u32(r)
}

fn read_header<R: Read>(r: &mut R, expected: Kind) -> Result<Modulus> {
    Modulus::from_log2(read_header_raw(r, expected)?)
}

fn read_bits<R: Read>(r: &mut R, len: usize) -> Result<Vec<u8>> {
    let mut bits = vec![0u8; len];
    r.read_exact(&mut bits)?;
    Ok(bits)
}

fn read_words<R: Read>(r: &mut R, len: usize) -> Result<Vec<u64>> {
    let mut bytes = vec![0u8; len * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

fn write_words<W: Write>(w: &mut W, words: &[u64]) -> Result<()> {
    let mut buf = Vec::with_capacity(words.len() * 8);
    for v in words {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

impl KeyCodec for LweSecretKey {
    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, Kind::LweSecret, 0)?;
        write_u64(w, self.dim() as u64)?;
        w.write_all(self.bits())?;
        Ok(())
    }

    fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        // secret keys carry no modulus; the field is written as 0
        read_header_raw(r, Kind::LweSecret)?;
        let dim = read_len(r)?;
        LweSecretKey::from_bits(read_bits(r, dim)?)
    }
}

impl KeyCodec for GlweSecretKey {
    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, Kind::GlweSecret, 0)?;
        write_u64(w, self.k() as u64)?;
        write_u64(w, self.degree() as u64)?;
        for j in 0..self.k() {
            w.write_all(self.poly(j))?;
        }
        Ok(())
    }

    fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_header_raw(r, Kind::GlweSecret)?;
        let k = read_len(r)?;
        let n = read_len(r)?;
        let polys = (0..k).map(|_| read_bits(r, n)).collect::<Result<Vec<_>>>()?;
        GlweSecretKey::from_polys(polys)
    }
}

impl KeyCodec for BootstrappingKey {
    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let first = self
            .ggsw
            .first()
            .ok_or_else(|| Error::KeyFormat("empty bootstrapping key".into()))?;
        write_header(w, Kind::Bootstrapping, first.rows[0].modulus().log2())?;
        for v in [
            self.len(),
            first.k(),
            first.degree(),
            first.level,
            first.base_log as usize,
        ] {
            write_u64(w, v as u64)?;
        }
        for g in &self.ggsw {
            for row in &g.rows {
                for p in row.components() {
                    write_words(w, p.coeffs())?;
                }
            }
        }
        Ok(())
    }

    fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let q = read_header(r, Kind::Bootstrapping)?;
        let n = read_len(r)?;
        let k = read_len(r)?;
        let big_n = read_len(r)?;
        let level = read_len(r)?;
        let base_log = read_len(r)? as u32;
        if !big_n.is_power_of_two() || level == 0 || k == 0 {
            return Err(Error::KeyFormat("invalid bootstrapping key shape".into()));
        }
        let mut ggsw = Vec::with_capacity(n);
        for _ in 0..n {
            let mut rows = Vec::with_capacity((k + 1) * level);
            for _ in 0..(k + 1) * level {
                let mut comps = (0..=k)
                    .map(|_| TorusPoly::from_coeffs(read_words(r, big_n)?, q))
                    .collect::<Result<Vec<_>>>()?;
                let body = comps.pop().expect("k + 1 components");
                rows.push(GlweCiphertext { mask: comps, body });
            }
            ggsw.push(GgswCiphertext {
                rows,
                level,
                base_log,
            });
        }
        Ok(BootstrappingKey::from_ggsw(ggsw))
    }
}

impl KeyCodec for KeyswitchKey {
    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, Kind::Keyswitch, self.modulus().log2())?;
        for v in [
            self.input_dim(),
            self.output_dim(),
            self.level(),
            self.base_log() as usize,
        ] {
            write_u64(w, v as u64)?;
        }
        write_words(w, self.raw())
    }

    fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let q = read_header(r, Kind::Keyswitch)?;
        let input_dim = read_len(r)?;
        let output_dim = read_len(r)?;
        let level = read_len(r)?;
        let base_log = read_len(r)? as u32;
        let words = input_dim * level * (output_dim + 1);
        let data = read_words(r, words)?;
        KeyswitchKey::from_raw(data, input_dim, output_dim, level, base_log, q)
    }
}
