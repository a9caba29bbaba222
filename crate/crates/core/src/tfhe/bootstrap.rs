use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tfhe::decompose::Decomposer;
use crate::tfhe::glwe::{encrypt_ggsw, GgswCiphertext, GlweCiphertext, GlweSecretKey, SpectralGgsw};
use crate::tfhe::lwe::{Encoding, LweCiphertext, LweSecretKey};
use crate::tfhe::params::TfheParams;
use crate::tfhe::rng::TfheRng;
use crate::torus::{mod_switch, Modulus, Rotation, Sign, TorusPoly};
use crate::transform::{negacyclic_mul_naive, FoldedFft, FoldedSpectrum};

/// `n` GGSW encryptions of the LWE key bits under the GLWE key.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrappingKey {
    pub ggsw: Vec<GgswCiphertext>,
    spectral: Option<Vec<SpectralGgsw>>,
}

impl BootstrappingKey {
    pub fn generate(
        lwe_key: &LweSecretKey,
        glwe_key: &GlweSecretKey,
        params: &TfheParams,
        rng: &TfheRng,
        fft: Option<&FoldedFft>,
    ) -> Result<Self> {
        let ggsw = lwe_key
            .bits()
            .par_iter()
            .enumerate()
            .map(|(i, &bit)| {
                let mut r = rng.split(i as u64);
                encrypt_ggsw(bit as u64, glwe_key, params, &mut r, fft)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BootstrappingKey {
            ggsw,
            spectral: None,
        })
    }

    pub fn from_ggsw(ggsw: Vec<GgswCiphertext>) -> Self {
        BootstrappingKey {
            ggsw,
            spectral: None,
        }
    }

    /// Precomputes the transform of every row polynomial.
    pub fn with_spectral(mut self, fft: &FoldedFft) -> Result<Self> {
        let spectral = self
            .ggsw
            .par_iter()
            .map(|g| g.to_spectral(fft))
            .collect::<Result<Vec<_>>>()?;
        self.spectral = Some(spectral);
        Ok(self)
    }

    pub fn spectral(&self) -> Option<&[SpectralGgsw]> {
        self.spectral.as_deref()
    }

    pub fn len(&self) -> usize {
        self.ggsw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ggsw.is_empty()
    }
}

/// Reusable buffers for the transform-domain external product.
pub struct ExternalProductScratch {
    digits: Vec<Vec<i64>>,
    digit_spectrum: FoldedSpectrum,
    acc: Vec<FoldedSpectrum>,
    fft_scratch: Vec<Complex64>,
}

impl ExternalProductScratch {
    pub fn new(params: &TfheParams, fft: &FoldedFft) -> Self {
        let n = params.big_n;
        ExternalProductScratch {
            digits: vec![vec![0; n]; params.l_b],
            digit_spectrum: FoldedSpectrum::zero(n),
            acc: vec![FoldedSpectrum::zero(n); params.k + 1],
            fft_scratch: fft.make_scratch(),
        }
    }
}

fn check_glwe(glwe: &GlweCiphertext, params: &TfheParams) -> Result<()> {
    if glwe.k() != params.k || glwe.degree() != params.big_n || glwe.modulus() != params.modulus() {
        return Err(Error::ShapeMismatch(format!(
            "GLWE (k = {}, N = {}) does not match parameters (k = {}, N = {})",
            glwe.k(),
            glwe.degree(),
            params.k,
            params.big_n
        )));
    }
    Ok(())
}

/// `out += ggsw ⊡ glwe`, multiplying in the transform domain.
pub fn external_product_add_assign(
    out: &mut GlweCiphertext,
    ggsw: &SpectralGgsw,
    glwe: &GlweCiphertext,
    dec: &Decomposer,
    fft: &FoldedFft,
    scratch: &mut ExternalProductScratch,
) -> Result<()> {
    let q = glwe.modulus();
    let level = dec.level();
    for acc in scratch.acc.iter_mut() {
        acc.clear();
    }
    for (j, comp) in glwe.components().enumerate() {
        dec.decompose_into(comp.coeffs(), &mut scratch.digits);
        for (i, digit) in scratch.digits.iter().enumerate() {
            fft.forward_signed_with_scratch(digit, &mut scratch.digit_spectrum, &mut scratch.fft_scratch);
            let row = &ggsw.rows[j * level + i];
            for (acc, col) in scratch.acc.iter_mut().zip(row) {
                acc.mul_acc(&scratch.digit_spectrum, col);
            }
        }
    }
    for (c, acc) in scratch.acc.iter_mut().enumerate() {
        let target = out.component_mut(c).coeffs_mut();
        fft.inverse_with_scratch(acc, &mut scratch.fft_scratch, |idx, v| {
            target[idx] = q.add(target[idx], q.from_i64(v));
        })?;
    }
    Ok(())
}

/// GGSW ⊡ GLWE through the transform domain.
pub fn external_product(
    ggsw: &SpectralGgsw,
    glwe: &GlweCiphertext,
    params: &TfheParams,
    fft: &FoldedFft,
) -> Result<GlweCiphertext> {
    check_glwe(glwe, params)?;
    let dec = Decomposer::new(params.base_b, params.l_b, params.modulus())?;
    let mut scratch = ExternalProductScratch::new(params, fft);
    let mut out = GlweCiphertext::zero(params.k, params.big_n, params.modulus());
    external_product_add_assign(&mut out, ggsw, glwe, &dec, fft, &mut scratch)?;
    Ok(out)
}

/// GGSW ⊡ GLWE with schoolbook polynomial products. Exact for any `q`.
pub fn external_product_naive(
    ggsw: &GgswCiphertext,
    glwe: &GlweCiphertext,
    params: &TfheParams,
) -> Result<GlweCiphertext> {
    check_glwe(glwe, params)?;
    let q = params.modulus();
    let dec = Decomposer::new(params.base_b, params.l_b, q)?;
    let mut out = GlweCiphertext::zero(params.k, params.big_n, q);
    for (j, comp) in glwe.components().enumerate() {
        for (i, digit) in dec.decompose_poly(comp)?.iter().enumerate() {
            let row = ggsw.row(j, i);
            for (c, poly) in row.components().enumerate() {
                let prod = negacyclic_mul_naive(digit, poly)?;
                out.component_mut(c).add_sub_assign(&prod, Sign::Plus)?;
            }
        }
    }
    Ok(out)
}

/// Mod-switches every entry of an LWE ciphertext to `Z_{2N}`; body last.
pub fn mod_switch_lwe(c: &LweCiphertext, big_n: usize) -> Result<Vec<u64>> {
    let two_n = 2 * big_n as u64;
    let q = c.modulus();
    c.mask
        .iter()
        .chain(std::iter::once(&c.body))
        .map(|&x| mod_switch(x, q, two_n))
        .collect()
}

pub struct BlindRotation {
    pub acc: GlweCiphertext,
    pub external_products: usize,
}

/// Rotates `tv` by the phase of a mod-switched ciphertext `switched`
/// (`n` mask entries then the body, all in `[0, 2N)`).
///
/// Starting from `X^{-b} * tv`, each step applies the CMux
/// `acc <- acc + bsk_i ⊡ (X^{a_i} * acc - acc)`.
pub fn blind_rotate(
    tv: &GlweCiphertext,
    switched: &[u64],
    bsk: &BootstrappingKey,
    params: &TfheParams,
    fft: &FoldedFft,
) -> Result<BlindRotation> {
    check_glwe(tv, params)?;
    let n = bsk.len();
    if switched.len() != n + 1 {
        return Err(Error::ShapeMismatch(format!(
            "switched ciphertext has {} entries, bootstrapping key expects {}",
            switched.len(),
            n + 1
        )));
    }
    let two_n = 2 * params.big_n as u64;
    if let Some(bad) = switched.iter().find(|&&x| x >= two_n) {
        return Err(Error::InvalidParameter(format!("switched entry {bad} not below 2N = {two_n}")));
    }
    let q = params.modulus();
    let b = switched[n] as usize;
    let mut acc = GlweCiphertext {
        mask: tv.mask.iter().map(|p| rotated(p, b, Rotation::Left)).collect(),
        body: rotated(&tv.body, b, Rotation::Left),
    };
    let mut diff = GlweCiphertext::zero(params.k, params.big_n, q);
    let mut count = 0;

    match bsk.spectral().filter(|_| q.log2() <= 32) {
        Some(spectral) => {
            let dec = Decomposer::new(params.base_b, params.l_b, q)?;
            let mut scratch = ExternalProductScratch::new(params, fft);
            for (ggsw, &a) in spectral.iter().zip(switched) {
                rotate_minus_self(&acc, a as usize, &mut diff);
                external_product_add_assign(&mut acc, ggsw, &diff, &dec, fft, &mut scratch)?;
                count += 1;
            }
        }
        None => {
            for (ggsw, &a) in bsk.ggsw.iter().zip(switched) {
                rotate_minus_self(&acc, a as usize, &mut diff);
                let prod = external_product_naive(ggsw, &diff, params)?;
                acc = acc.add_sub(&prod, Sign::Plus)?;
                count += 1;
            }
        }
    }
    Ok(BlindRotation {
        acc,
        external_products: count,
    })
}

fn rotated(p: &TorusPoly, r: usize, dir: Rotation) -> TorusPoly {
    let mut out = TorusPoly::zero(p.degree(), p.modulus());
    p.rotate_into(r, dir, &mut out);
    out
}

/// `out = X^r * acc - acc`, component-wise.
fn rotate_minus_self(acc: &GlweCiphertext, r: usize, out: &mut GlweCiphertext) {
    let q = acc.modulus();
    for c in 0..=acc.k() {
        let src = acc.component(c);
        let dst = out.component_mut(c);
        src.rotate_into(r, Rotation::Right, dst);
        for (d, &s) in dst.coeffs_mut().iter_mut().zip(src.coeffs()) {
            *d = q.sub(*d, s);
        }
    }
}

/// LWE encryption of the constant coefficient, under the flattened GLWE key.
pub fn sample_extract(glwe: &GlweCiphertext) -> LweCiphertext {
    let n = glwe.degree();
    let q = glwe.modulus();
    let mut mask = Vec::with_capacity(glwe.k() * n);
    for a in &glwe.mask {
        let c = a.coeffs();
        mask.push(c[0]);
        mask.extend((1..n).map(|i| q.neg(c[n - i])));
    }
    LweCiphertext::new(mask, glwe.body.coeffs()[0], q)
}

/// Univariate function on `p`-bit messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookUpTable {
    entries: Vec<u64>,
    encoding: Encoding,
}

impl LookUpTable {
    pub fn new(entries: Vec<u64>, encoding: Encoding) -> Result<Self> {
        if entries.len() as u64 != encoding.message_space() {
            return Err(Error::InvalidParameter(format!(
                "table has {} entries, a {}-bit message space needs {}",
                entries.len(),
                encoding.bits,
                encoding.message_space()
            )));
        }
        if let Some(&m) = entries.iter().find(|&&m| m >= encoding.message_space()) {
            return Err(Error::MessageOutOfRange {
                message: m,
                bits: encoding.bits,
            });
        }
        Ok(LookUpTable { entries, encoding })
    }

    pub fn from_fn(encoding: Encoding, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new((0..encoding.message_space()).map(f).collect(), encoding)
    }

    pub fn identity(encoding: Encoding) -> Self {
        Self::from_fn(encoding, |m| m).expect("identity fits")
    }

    pub fn constant(encoding: Encoding, value: u64) -> Result<Self> {
        Self::from_fn(encoding, |_| value)
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn apply(&self, m: u64) -> u64 {
        self.entries[m as usize]
    }

    /// Number of test-vector coefficients per message slot, `N / 2^p`.
    pub fn redundancy(&self, big_n: usize) -> usize {
        big_n >> self.encoding.bits
    }

    /// Staircase test vector, shifted back by half a slot so that a phase
    /// anywhere within half a slot of `m` reads `lut[m]`.
    pub fn test_vector(&self, big_n: usize, q: Modulus) -> Result<TorusPoly> {
        if (1usize << self.encoding.bits) > big_n {
            return Err(Error::InvalidParameter(format!(
                "{}-bit table does not fit in N = {big_n}",
                self.encoding.bits
            )));
        }
        let width = self.redundancy(big_n);
        let coeffs = (0..big_n)
            .map(|j| self.encoding.encode(self.entries[j / width], q))
            .collect::<Result<Vec<_>>>()?;
        let staircase = TorusPoly::from_coeffs(coeffs, q)?;
        Ok(rotated(&staircase, width / 2, Rotation::Left))
    }
}

/// Bootstraps `c` with an arbitrary plaintext test vector.
pub fn pbs_with_test_vector(
    c: &LweCiphertext,
    tv: &TorusPoly,
    bsk: &BootstrappingKey,
    params: &TfheParams,
    fft: &FoldedFft,
) -> Result<LweCiphertext> {
    if c.dim() != bsk.len() {
        return Err(Error::ShapeMismatch(format!(
            "ciphertext dimension {} but bootstrapping key has {} entries",
            c.dim(),
            bsk.len()
        )));
    }
    let switched = mod_switch_lwe(c, params.big_n)?;
    let tv = GlweCiphertext::trivial(params.k, tv.clone());
    let rotation = blind_rotate(&tv, &switched, bsk, params, fft)?;
    Ok(sample_extract(&rotation.acc))
}

/// Programmable bootstrap: the output encrypts `lut[m]` under the flattened
/// GLWE key, with noise independent of the input's.
pub fn pbs(
    c: &LweCiphertext,
    lut: &LookUpTable,
    bsk: &BootstrappingKey,
    params: &TfheParams,
    fft: &FoldedFft,
) -> Result<LweCiphertext> {
    let tv = lut.test_vector(params.big_n, params.modulus())?;
    pbs_with_test_vector(c, &tv, bsk, params, fft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfhe::glwe::encrypt_glwe;
    use crate::tfhe::params::ParamSet;

    fn small_params(big_n: usize) -> TfheParams {
        TfheParams {
            name: Some("small".into()),
            n: 8,
            big_n,
            k: 1,
            l_b: 3,
            base_b: 1 << 6,
            l_k: 3,
            base_k: 1 << 4,
            log2_q: 32,
            lwe_noise_std: 0.0,
            glwe_noise_std: 0.0,
            lambda: 0,
        }
    }

    fn random_glwe(params: &TfheParams, rng: &mut TfheRng) -> GlweCiphertext {
        let q = params.modulus();
        let poly = |rng: &mut TfheRng| {
            TorusPoly::from_coeffs((0..params.big_n).map(|_| rng.uniform(q)).collect(), q).unwrap()
        };
        GlweCiphertext {
            mask: (0..params.k).map(|_| poly(rng)).collect(),
            body: poly(rng),
        }
    }

    #[test]
    fn spectral_matches_naive_external_product() {
        for big_n in [8usize, 64] {
            let params = small_params(big_n);
            let fft = FoldedFft::new(big_n).unwrap();
            let mut rng = TfheRng::from_seed(big_n as u64);
            let key = GlweSecretKey::generate(1, big_n, &mut rng);
            let noisy = TfheParams { glwe_noise_std: 1e-6, ..params.clone() };
            for bit in [0, 1] {
                let g = encrypt_ggsw(bit, &key, &noisy, &mut rng, None).unwrap();
                let sg = g.to_spectral(&fft).unwrap();
                for _ in 0..5 {
                    let glwe = random_glwe(&params, &mut rng);
                    assert_eq!(
                        external_product(&sg, &glwe, &params, &fft).unwrap(),
                        external_product_naive(&g, &glwe, &params).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn external_product_selects_by_bit() {
        let params = ParamSet::I.params().noiseless();
        let q = params.modulus();
        let fft = FoldedFft::new(params.big_n).unwrap();
        let mut rng = TfheRng::from_seed(5);
        let key = GlweSecretKey::generate(1, params.big_n, &mut rng);
        let msg = TorusPoly::from_coeffs(
            (0..params.big_n).map(|i| ((i % 8) as u64) << 28).collect(),
            q,
        )
        .unwrap();
        let glwe = encrypt_glwe(&msg, &key, 0.0, &mut rng, Some(&fft)).unwrap();
        for bit in [0u64, 1] {
            let g = encrypt_ggsw(bit, &key, &params, &mut rng, Some(&fft)).unwrap();
            let out = external_product(&g.to_spectral(&fft).unwrap(), &glwe, &params, &fft).unwrap();
            let phase = out.phase(&key, Some(&fft)).unwrap();
            for (p, m) in phase.coeffs().iter().zip(msg.coeffs()) {
                let expected = if bit == 1 { *m } else { 0 };
                let err = q.to_i64(q.sub(*p, expected)).unsigned_abs();
                // rounding error q / (2 B^l) = 2^15 summed over ~N/2 key bits
                assert!(err < 1 << 23, "bit {bit}: error {err}");
            }
        }
    }

    #[test]
    fn sample_extract_trivial_and_phase() {
        let params = small_params(16);
        let q = params.modulus();
        let glwe = GlweCiphertext::trivial(1, TorusPoly::constant(16, 77, q));
        let lwe = sample_extract(&glwe);
        assert_eq!(lwe.dim(), 16);
        assert!(lwe.mask.iter().all(|&a| a == 0));
        assert_eq!(lwe.body, 77);

        let mut rng = TfheRng::from_seed(6);
        let key = GlweSecretKey::generate(1, 16, &mut rng);
        let flat = key.flatten();
        for _ in 0..100 {
            let c = random_glwe(&params, &mut rng);
            let phase = c.phase(&key, None).unwrap();
            assert_eq!(sample_extract(&c).phase(&flat).unwrap(), phase.coeffs()[0]);
        }
    }

    #[test]
    fn zero_key_rotation_ignores_mask() {
        let params = small_params(64);
        let q = params.modulus();
        let fft = FoldedFft::new(64).unwrap();
        let mut rng = TfheRng::from_seed(7);
        let glwe_key = GlweSecretKey::generate(1, 64, &mut rng);
        let lwe_key = LweSecretKey::zero(params.n);
        let bsk = BootstrappingKey::generate(&lwe_key, &glwe_key, &params, &rng, Some(&fft))
            .unwrap()
            .with_spectral(&fft)
            .unwrap();
        let tv_poly = TorusPoly::from_coeffs((0..64).map(|i| (i as u64) << 20).collect(), q).unwrap();
        let tv = GlweCiphertext::trivial(1, tv_poly.clone());
        let mut switched: Vec<u64> = (0..params.n).map(|_| rng.below(128)).collect();
        switched.push(37);
        let out = blind_rotate(&tv, &switched, &bsk, &params, &fft).unwrap();
        assert_eq!(out.external_products, params.n);
        let phase = out.acc.phase(&glwe_key, None).unwrap();
        let expected = tv_poly.rotate(37, Rotation::Left);
        for (p, e) in phase.coeffs().iter().zip(expected.coeffs()) {
            assert!(q.to_i64(q.sub(*p, *e)).unsigned_abs() < 1 << 16);
        }
    }

    #[test]
    fn test_vector_staircase() {
        let q = Modulus::Q32;
        let enc = Encoding::new(2);
        let lut = LookUpTable::identity(enc);
        let tv = lut.test_vector(16, q).unwrap();
        // width 4, shifted back by 2: [0,0,1,1,1,1,2,2,2,2,3,3,3,3,-0,-0]
        let decoded: Vec<i64> = tv.coeffs().iter().map(|&c| q.to_i64(c) / enc.delta(q) as i64).collect();
        assert_eq!(decoded, vec![0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 0, 0]);
        assert!(LookUpTable::identity(Encoding::new(5)).test_vector(16, q).is_err());
        assert!(LookUpTable::new(vec![0, 1, 2], enc).is_err());
    }

    #[test]
    fn rejects_bad_switched_input() {
        let params = small_params(8);
        let fft = FoldedFft::new(8).unwrap();
        let rng = TfheRng::from_seed(8);
        let bsk = BootstrappingKey::generate(
            &LweSecretKey::zero(params.n),
            &GlweSecretKey::zero(1, 8),
            &params,
            &rng,
            None,
        )
        .unwrap();
        let tv = GlweCiphertext::zero(1, 8, params.modulus());
        assert!(blind_rotate(&tv, &[0; 3], &bsk, &params, &fft).is_err());
        assert!(blind_rotate(&tv, &[16; 9], &bsk, &params, &fft).is_err());
    }
}
