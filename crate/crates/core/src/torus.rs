//! Exact arithmetic over `Z_q` and `Z_q[X]/(X^N + 1)` for power-of-two `q`.
//!
//! Torus elements are stored as `u64` words reduced modulo `q`. With
//! `q = 2^64` reduction is plain wrapping arithmetic; for smaller moduli the
//! high bits are masked off after every operation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single torus element, always `< q` for the modulus it belongs to.
pub type TorusScalar = u64;

/// Power-of-two ciphertext modulus `q = 2^log2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus {
    log2: u32,
}

impl Modulus {
    pub const Q32: Modulus = Modulus { log2: 32 };
    pub const Q64: Modulus = Modulus { log2: 64 };

    pub fn from_log2(log2: u32) -> Result<Self> {
        if log2 == 0 || log2 > 64 {
            return Err(Error::InvalidParameter(format!(
                "modulus 2^{log2} is outside 2^1..=2^64"
            )));
        }
        Ok(Modulus { log2 })
    }

    #[inline]
    pub fn log2(self) -> u32 {
        self.log2
    }

    #[inline]
    fn mask(self) -> u64 {
        if self.log2 == 64 {
            u64::MAX
        } else {
            (1u64 << self.log2) - 1
        }
    }

    /// Bytes needed to store one coefficient in a word-aligned layout.
    pub fn bytes_per_coeff(self) -> usize {
        if self.log2 <= 32 {
            4
        } else {
            8
        }
    }

    /// `q` as an `f64` (exact for powers of two).
    #[inline]
    pub fn as_f64(self) -> f64 {
        (self.log2 as f64).exp2()
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x & self.mask()
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        a.wrapping_add(b) & self.mask()
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        a.wrapping_sub(b) & self.mask()
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        a.wrapping_neg() & self.mask()
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a.wrapping_mul(b) & self.mask()
    }

    /// Embeds a signed integer into `Z_q`.
    #[inline]
    pub fn from_i64(self, x: i64) -> u64 {
        (x as u64) & self.mask()
    }

    /// Centered representative in `[-q/2, q/2)`.
    #[inline]
    pub fn to_i64(self, x: u64) -> i64 {
        if self.log2 == 64 {
            x as i64
        } else {
            let shift = 64 - self.log2;
            ((x << shift) as i64) >> shift
        }
    }

    /// Maps a real torus value (fraction of `q`) to `Z_q`, rounding to nearest.
    pub fn from_torus_f64(self, t: f64) -> u64 {
        let frac = t - t.floor();
        let scaled = (frac * self.as_f64()).round();
        // frac * q can round up to exactly q
        if scaled >= self.as_f64() {
            0
        } else {
            self.reduce(scaled as u64)
        }
    }

    /// Centered torus value of `x` as a fraction of `q`, in `[-1/2, 1/2)`.
    pub fn to_torus_f64(self, x: u64) -> f64 {
        self.to_i64(x) as f64 / self.as_f64()
    }
}

impl TryFrom<u32> for Modulus {
    type Error = Error;

    fn try_from(log2: u32) -> Result<Self> {
        Modulus::from_log2(log2)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.log2
    }
}

/// Switches `c` from modulus `q` to the power-of-two modulus `two_n`.
///
/// Returns `round(c * two_n / q) mod two_n`; ties round away from zero.
pub fn mod_switch(c: TorusScalar, q: Modulus, two_n: u64) -> Result<u64> {
    if !two_n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "target modulus {two_n} is not a power of two"
        )));
    }
    let log_target = two_n.trailing_zeros();
    if log_target > q.log2() {
        return Err(Error::InvalidParameter(format!(
            "target modulus 2^{log_target} exceeds q = 2^{}",
            q.log2()
        )));
    }
    let shift = q.log2() - log_target;
    if shift == 0 {
        return Ok(c & (two_n - 1));
    }
    let rounded = ((c as u128 + (1u128 << (shift - 1))) >> shift) as u64;
    Ok(rounded & (two_n - 1))
}

/// Direction of a negacyclic monomial rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// Multiply by `X^r`.
    Right,
    /// Multiply by `X^-r`.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Polynomial of degree `< N` over `Z_q`, arithmetic modulo `X^N + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoly {
    coeffs: Vec<u64>,
    modulus: Modulus,
}

impl TorusPoly {
    pub fn zero(degree: usize, modulus: Modulus) -> Self {
        TorusPoly {
            coeffs: vec![0; degree],
            modulus,
        }
    }

    /// Builds a polynomial from raw words, reducing each one modulo `q`.
    pub fn from_coeffs(coeffs: Vec<u64>, modulus: Modulus) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "ring degree {} is not a power of two",
                coeffs.len()
            )));
        }
        let coeffs = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        Ok(TorusPoly { coeffs, modulus })
    }

    pub fn from_signed(coeffs: &[i64], modulus: Modulus) -> Result<Self> {
        Self::from_coeffs(
            coeffs.iter().map(|&c| modulus.from_i64(c)).collect(),
            modulus,
        )
    }

    /// `c * X^0`.
    pub fn constant(degree: usize, value: u64, modulus: Modulus) -> Self {
        let mut p = Self::zero(degree, modulus);
        p.coeffs[0] = modulus.reduce(value);
        p
    }

    /// `value * X^exponent` for `exponent < N`.
    pub fn monomial(degree: usize, exponent: usize, value: u64, modulus: Modulus) -> Self {
        let mut p = Self::zero(degree, modulus);
        p.coeffs[exponent % degree] = modulus.reduce(value);
        p
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Mutable view of the coefficients. Callers must keep values `< q`.
    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [u64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &TorusPoly) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::ShapeMismatch(format!(
                "ring degrees {} and {} differ",
                self.degree(),
                other.degree()
            )));
        }
        if self.modulus != other.modulus {
            return Err(Error::ShapeMismatch(format!(
                "moduli 2^{} and 2^{} differ",
                self.modulus.log2(),
                other.modulus.log2()
            )));
        }
        Ok(())
    }

    /// Coefficient-wise `self ± other`.
    pub fn add_sub(&self, other: &TorusPoly, sign: Sign) -> Result<TorusPoly> {
        let mut out = self.clone();
        out.add_sub_assign(other, sign)?;
        Ok(out)
    }

    pub fn add_sub_assign(&mut self, other: &TorusPoly, sign: Sign) -> Result<()> {
        self.check_compatible(other)?;
        let q = self.modulus;
        match sign {
            Sign::Plus => {
                for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
                    *a = q.add(*a, b);
                }
            }
            Sign::Minus => {
                for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
                    *a = q.sub(*a, b);
                }
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> TorusPoly {
        let q = self.modulus;
        TorusPoly {
            coeffs: self.coeffs.iter().map(|&c| q.neg(c)).collect(),
            modulus: q,
        }
    }

    pub fn scalar_mul(&self, k: u64) -> TorusPoly {
        let q = self.modulus;
        TorusPoly {
            coeffs: self.coeffs.iter().map(|&c| q.mul(c, k)).collect(),
            modulus: q,
        }
    }

    /// Negacyclic rotation by an amount already reduced into `[0, 2N)`.
    ///
    /// Writes `X^{±r} * self` into `out`, which must have the same degree.
    pub fn rotate_into(&self, r: usize, dir: Rotation, out: &mut TorusPoly) {
        let n = self.degree();
        debug_assert!(r < 2 * n);
        debug_assert_eq!(out.degree(), n);
        let q = self.modulus;
        // X^{-r} == X^{2N - r}
        let r = match dir {
            Rotation::Right => r,
            Rotation::Left => (2 * n - r) % (2 * n),
        };
        let (shift, negate_all) = if r >= n { (r - n, true) } else { (r, false) };
        // coefficients [0, n - shift) move up by `shift`, the rest wrap to the front negated
        let (head, tail) = self.coeffs.split_at(n - shift);
        let (front, back) = out.coeffs.split_at_mut(shift);
        copy_signed(head, back, negate_all, q);
        copy_signed(tail, front, !negate_all, q);
    }

    /// `X^{±r} * self` for any integer `r` (reduced modulo `2N` here).
    pub fn rotate(&self, r: i64, dir: Rotation) -> TorusPoly {
        let two_n = 2 * self.degree() as i64;
        let r = r.rem_euclid(two_n) as usize;
        let mut out = TorusPoly::zero(self.degree(), self.modulus);
        self.rotate_into(r, dir, &mut out);
        out
    }

    /// Product with a polynomial whose coefficients are all 0 or 1.
    ///
    /// Exact in `Z_q` and costs `O(N * weight)`; used for secret-key products.
    pub fn mul_binary(&self, key: &[u8]) -> Result<TorusPoly> {
        let n = self.degree();
        if key.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "binary polynomial has {} coefficients, expected {n}",
                key.len()
            )));
        }
        let q = self.modulus;
        let mut out = vec![0u64; n];
        for (shift, _) in key.iter().enumerate().filter(|(_, &b)| b != 0) {
            // out += X^shift * self
            let (head, tail) = self.coeffs.split_at(n - shift);
            for (o, &c) in out[shift..].iter_mut().zip(head) {
                *o = q.add(*o, c);
            }
            for (o, &c) in out[..shift].iter_mut().zip(tail) {
                *o = q.sub(*o, c);
            }
        }
        Ok(TorusPoly { coeffs: out, modulus: q })
    }
}

#[inline]
fn copy_signed(src: &[u64], dst: &mut [u64], negate: bool, q: Modulus) {
    if negate {
        for (d, &c) in dst.iter_mut().zip(src) {
            *d = q.neg(c);
        }
    } else {
        dst.copy_from_slice(src);
    }
}
