use crate::error::{Error, Result};
use crate::tfhe::lwe::LweSecretKey;
use crate::tfhe::params::TfheParams;
use crate::tfhe::rng::TfheRng;
use crate::torus::{Modulus, Sign, TorusPoly};
use crate::transform::{FoldedFft, FoldedSpectrum};

/// `k` binary polynomials of degree `< N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlweSecretKey {
    polys: Vec<Vec<u8>>,
}

impl GlweSecretKey {
    pub fn generate(k: usize, degree: usize, rng: &mut TfheRng) -> Self {
        GlweSecretKey {
            polys: (0..k)
                .map(|_| (0..degree).map(|_| rng.binary()).collect())
                .collect(),
        }
    }

    pub fn from_polys(polys: Vec<Vec<u8>>) -> Result<Self> {
        let degree = polys.first().map_or(0, |p| p.len());
        if polys.is_empty() || polys.iter().any(|p| p.len() != degree) {
            return Err(Error::ShapeMismatch("GLWE key polynomials must share one degree".into()));
        }
        if polys.iter().flatten().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("secret key must be binary".into()));
        }
        Ok(GlweSecretKey { polys })
    }

    pub fn zero(k: usize, degree: usize) -> Self {
        GlweSecretKey {
            polys: vec![vec![0; degree]; k],
        }
    }

    pub fn k(&self) -> usize {
        self.polys.len()
    }

    pub fn degree(&self) -> usize {
        self.polys[0].len()
    }

    pub fn poly(&self, j: usize) -> &[u8] {
        &self.polys[j]
    }

    /// LWE key of dimension `k*N` under which sample extraction decrypts.
    pub fn flatten(&self) -> LweSecretKey {
        LweSecretKey::from_bits(self.polys.concat()).expect("binary")
    }
}

/// Product of a torus polynomial with a binary key polynomial.
///
/// For `q <= 2^32` the folded FFT is exact (magnitudes stay below 2^43) and
/// much faster; otherwise, or if the transform reports a precision fault,
/// the exact shift-and-add product is used.
pub fn mul_by_key(a: &TorusPoly, key: &[u8], fft: Option<&FoldedFft>) -> Result<TorusPoly> {
    if let Some(fft) = fft {
        if a.modulus().log2() <= 32 && fft.degree() == a.degree() {
            let k: Vec<i64> = key.iter().map(|&b| b as i64).collect();
            let fa = fft.forward(a)?;
            let fk = fft.forward_signed(&k)?;
            match fft.inverse(&fa.mul(&fk), a.modulus()) {
                Ok(p) => return Ok(p),
                Err(Error::PrecisionFault { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    a.mul_binary(key)
}

/// `(A_1..A_k, B)` with `B = sum_j A_j * S_j + E + M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlweCiphertext {
    pub mask: Vec<TorusPoly>,
    pub body: TorusPoly,
}

impl GlweCiphertext {
    pub fn trivial(k: usize, body: TorusPoly) -> Self {
        let (n, q) = (body.degree(), body.modulus());
        GlweCiphertext {
            mask: vec![TorusPoly::zero(n, q); k],
            body,
        }
    }

    pub fn zero(k: usize, degree: usize, q: Modulus) -> Self {
        GlweCiphertext::trivial(k, TorusPoly::zero(degree, q))
    }

    pub fn k(&self) -> usize {
        self.mask.len()
    }

    pub fn degree(&self) -> usize {
        self.body.degree()
    }

    pub fn modulus(&self) -> Modulus {
        self.body.modulus()
    }

    /// Component `j`: mask polynomials first, body last.
    pub fn component(&self, j: usize) -> &TorusPoly {
        if j < self.mask.len() {
            &self.mask[j]
        } else {
            &self.body
        }
    }

    pub fn component_mut(&mut self, j: usize) -> &mut TorusPoly {
        if j < self.mask.len() {
            &mut self.mask[j]
        } else {
            &mut self.body
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &TorusPoly> {
        self.mask.iter().chain(std::iter::once(&self.body))
    }

    pub fn add_sub(&self, other: &GlweCiphertext, sign: Sign) -> Result<GlweCiphertext> {
        if self.k() != other.k() {
            return Err(Error::ShapeMismatch("GLWE mask lengths differ".into()));
        }
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(a, b)| a.add_sub(b, sign))
            .collect::<Result<_>>()?;
        Ok(GlweCiphertext {
            mask,
            body: self.body.add_sub(&other.body, sign)?,
        })
    }

    pub fn rotate(&self, r: i64, dir: crate::torus::Rotation) -> GlweCiphertext {
        GlweCiphertext {
            mask: self.mask.iter().map(|p| p.rotate(r, dir)).collect(),
            body: self.body.rotate(r, dir),
        }
    }

    /// `B - sum_j A_j * S_j`.
    pub fn phase(&self, key: &GlweSecretKey, fft: Option<&FoldedFft>) -> Result<TorusPoly> {
        if key.k() != self.k() || key.degree() != self.degree() {
            return Err(Error::ShapeMismatch("GLWE key shape differs from ciphertext".into()));
        }
        let mut out = self.body.clone();
        for (j, a) in self.mask.iter().enumerate() {
            out.add_sub_assign(&mul_by_key(a, key.poly(j), fft)?, Sign::Minus)?;
        }
        Ok(out)
    }
}

/// Encrypts a plaintext polynomial.
pub fn encrypt_glwe(
    plaintext: &TorusPoly,
    key: &GlweSecretKey,
    noise_std: f64,
    rng: &mut TfheRng,
    fft: Option<&FoldedFft>,
) -> Result<GlweCiphertext> {
    let (n, q) = (plaintext.degree(), plaintext.modulus());
    if key.degree() != n {
        return Err(Error::ShapeMismatch("GLWE key degree differs from plaintext".into()));
    }
    let mut body = plaintext.clone();
    let mut mask = Vec::with_capacity(key.k());
    for j in 0..key.k() {
        let a = TorusPoly::from_coeffs((0..n).map(|_| rng.uniform(q)).collect(), q)?;
        body.add_sub_assign(&mul_by_key(&a, key.poly(j), fft)?, Sign::Plus)?;
        mask.push(a);
    }
    for c in body.coeffs_mut() {
        *c = q.add(*c, rng.gaussian(noise_std, q));
    }
    Ok(GlweCiphertext { mask, body })
}

/// `(k+1) * l_b` GLWE rows; row `j * l_b + (i - 1)` encrypts `mu * q / B^i`
/// added to component `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgswCiphertext {
    pub rows: Vec<GlweCiphertext>,
    pub level: usize,
    pub base_log: u32,
}

impl GgswCiphertext {
    pub fn k(&self) -> usize {
        self.rows[0].k()
    }

    pub fn degree(&self) -> usize {
        self.rows[0].degree()
    }

    pub fn row(&self, component: usize, level_index: usize) -> &GlweCiphertext {
        &self.rows[component * self.level + level_index]
    }

    pub fn to_spectral(&self, fft: &FoldedFft) -> Result<SpectralGgsw> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.components().map(|p| fft.forward(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralGgsw {
            rows,
            level: self.level,
        })
    }
}

/// GGSW with every row polynomial already in the transform domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGgsw {
    /// `rows[r][c]`: row `r`, output column `c`.
    pub rows: Vec<Vec<FoldedSpectrum>>,
    pub level: usize,
}

/// Encrypts a small integer `mu` (a key bit, in practice) as GGSW.
pub fn encrypt_ggsw(
    mu: u64,
    key: &GlweSecretKey,
    params: &TfheParams,
    rng: &mut TfheRng,
    fft: Option<&FoldedFft>,
) -> Result<GgswCiphertext> {
    let q = params.modulus();
    let (k, n, level, base_log) = (params.k, params.big_n, params.l_b, params.base_b_log2());
    let zero = TorusPoly::zero(n, q);
    let mut rows = Vec::with_capacity((k + 1) * level);
    for j in 0..=k {
        for i in 1..=level {
            let mut row = encrypt_glwe(&zero, key, params.glwe_noise_std, rng, fft)?;
            let weight = 1u64 << (q.log2() - base_log * i as u32);
            let target = row.component_mut(j);
            let c0 = target.coeffs()[0];
            target.coeffs_mut()[0] = q.add(c0, q.mul(mu, weight));
            rows.push(row);
        }
    }
    Ok(GgswCiphertext {
        rows,
        level,
        base_log,
    })
}
