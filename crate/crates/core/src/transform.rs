//! Negacyclic products through a half-length complex FFT.
//!
//! A real polynomial `a` of degree `< N` is folded into `N/2` complex points
//! `z_j = a_j + i*a_{j+N/2}`. Since `X^N + 1 = (X^{N/2} - i)(X^{N/2} + i)` and
//! `a` is real, its residue modulo `X^{N/2} - i` determines it completely.
//! Substituting `X = w*Y` with `w = exp(i*pi/N)` turns that residue ring into
//! a cyclic one, so a twist by `w^j` followed by an ordinary `N/2`-point FFT
//! diagonalises negacyclic multiplication.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::torus::{Modulus, TorusPoly};

/// Default bound on `|x - round(x)|` after the inverse transform.
pub const DEFAULT_PRECISION_THRESHOLD: f64 = 0.125;

/// Frequency-domain image of a folded, twisted polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedSpectrum {
    points: Vec<Complex64>,
    degree: usize,
}

impl FoldedSpectrum {
    pub fn zero(degree: usize) -> Self {
        FoldedSpectrum {
            points: vec![Complex64::new(0.0, 0.0); degree / 2],
            degree,
        }
    }

    #[inline]
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    #[inline]
    pub fn points_mut(&mut self) -> &mut [Complex64] {
        &mut self.points
    }

    /// Ring degree `N` of the polynomial this spectrum came from.
    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn clear(&mut self) {
        self.points.fill(Complex64::new(0.0, 0.0));
    }

    pub fn add(&self, other: &FoldedSpectrum) -> FoldedSpectrum {
        let mut out = self.clone();
        for (a, b) in out.points.iter_mut().zip(&other.points) {
            *a += b;
        }
        out
    }

    pub fn mul(&self, other: &FoldedSpectrum) -> FoldedSpectrum {
        let mut out = self.clone();
        for (a, b) in out.points.iter_mut().zip(&other.points) {
            *a *= b;
        }
        out
    }

    /// `self += a * b`, pointwise.
    #[inline]
    pub fn mul_acc(&mut self, a: &FoldedSpectrum, b: &FoldedSpectrum) {
        for ((acc, x), y) in self.points.iter_mut().zip(&a.points).zip(&b.points) {
            *acc += x * y;
        }
    }

    /// `sum |Z_k|^2 / (N/2)`, which equals the energy of the twisted signal.
    pub fn energy(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}

/// Above this magnitude an f64 cannot resolve the rounding error anyway.
const ROUND_LIMIT: f64 = (1u64 << 51) as f64;

/// Round to nearest for `|x| < 2^51` by pushing the fraction out of the
/// mantissa; much cheaper than `f64::round` on baseline x86-64.
#[inline(always)]
fn round_small(x: f64) -> f64 {
    const MAGIC: f64 = 6_755_399_441_055_744.0; // 1.5 * 2^52
    (x + MAGIC) - MAGIC
}

/// Precomputed plan for one ring degree. Immutable and cheap to clone.
#[derive(Clone)]
pub struct FoldedFft {
    degree: usize,
    twist: Arc<[Complex64]>,
    // conj(twist) / (N/2): undoes the twist and the FFT scaling in one pass
    untwist: Arc<[Complex64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    threshold: f64,
}

impl fmt::Debug for FoldedFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoldedFft")
            .field("degree", &self.degree)
            .field("threshold", &self.threshold)
            .finish()
    }
}

impl FoldedFft {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 4 || !degree.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "folded FFT needs a power-of-two degree >= 4, got {degree}"
            )));
        }
        let half = degree / 2;
        let twist: Vec<Complex64> = (0..half)
            .map(|j| Complex64::from_polar(1.0, PI * j as f64 / degree as f64))
            .collect();
        let scale = 1.0 / half as f64;
        let untwist: Vec<Complex64> = twist.iter().map(|w| w.conj() * scale).collect();
        let mut planner = FftPlanner::new();
        Ok(FoldedFft {
            degree,
            twist: twist.into(),
            untwist: untwist.into(),
            forward: planner.plan_fft_forward(half),
            inverse: planner.plan_fft_inverse(half),
            threshold: DEFAULT_PRECISION_THRESHOLD,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Scratch length needed by the `*_with_scratch` methods.
    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    pub fn make_scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len()]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.degree {
            return Err(Error::ShapeMismatch(format!(
                "polynomial of degree {len} given to a degree-{} transform",
                self.degree
            )));
        }
        Ok(())
    }

    /// Transforms a polynomial, reading its coefficients as centered integers.
    pub fn forward(&self, p: &TorusPoly) -> Result<FoldedSpectrum> {
        self.check_len(p.degree())?;
        let q = p.modulus();
        let mut out = FoldedSpectrum::zero(self.degree);
        let mut scratch = self.make_scratch();
        self.forward_with(|i| q.to_i64(p.coeffs()[i]) as f64, &mut out, &mut scratch);
        Ok(out)
    }

    /// Transforms a polynomial given by signed integer coefficients.
    pub fn forward_signed(&self, coeffs: &[i64]) -> Result<FoldedSpectrum> {
        self.check_len(coeffs.len())?;
        let mut out = FoldedSpectrum::zero(self.degree);
        let mut scratch = self.make_scratch();
        self.forward_signed_with_scratch(coeffs, &mut out, &mut scratch);
        Ok(out)
    }

    /// Allocation-free forward transform of signed coefficients into `out`.
    #[inline]
    pub fn forward_signed_with_scratch(
        &self,
        coeffs: &[i64],
        out: &mut FoldedSpectrum,
        scratch: &mut [Complex64],
    ) {
        debug_assert_eq!(coeffs.len(), self.degree);
        self.forward_with(|i| coeffs[i] as f64, out, scratch);
    }

    #[inline]
    fn forward_with(
        &self,
        coeff: impl Fn(usize) -> f64,
        out: &mut FoldedSpectrum,
        scratch: &mut [Complex64],
    ) {
        let half = self.degree / 2;
        for (j, (z, w)) in out.points.iter_mut().zip(self.twist.iter()).enumerate() {
            *z = Complex64::new(coeff(j), coeff(j + half)) * w;
        }
        self.forward.process_with_scratch(&mut out.points, scratch);
    }

    /// Inverts a spectrum back to a polynomial over `Z_q`.
    pub fn inverse(&self, s: &FoldedSpectrum, q: Modulus) -> Result<TorusPoly> {
        self.check_len(s.degree)?;
        let mut buf = s.clone();
        let mut scratch = self.make_scratch();
        let mut out = TorusPoly::zero(self.degree, q);
        self.inverse_with_scratch(&mut buf, &mut scratch, |i, v| {
            out.coeffs_mut()[i] = q.from_i64(v);
        })?;
        Ok(out)
    }

    /// Inverts `s` in place (its contents are destroyed) and hands each
    /// rounded coefficient `(index, value)` to `sink`.
    ///
    /// Every coefficient is rounded before the precision check runs, so the
    /// sink may already have seen values when an error is returned.
    pub fn inverse_with_scratch(
        &self,
        s: &mut FoldedSpectrum,
        scratch: &mut [Complex64],
        mut sink: impl FnMut(usize, i64),
    ) -> Result<()> {
        let half = self.degree / 2;
        self.inverse.process_with_scratch(&mut s.points, scratch);
        let mut max_error = 0.0f64;
        let mut max_abs = 0.0f64;
        for (j, (z, w)) in s.points.iter().zip(self.untwist.iter()).enumerate() {
            let v = z * w;
            let (re, im) = (round_small(v.re), round_small(v.im));
            max_error = max_error.max((v.re - re).abs()).max((v.im - im).abs());
            max_abs = max_abs.max(v.re.abs()).max(v.im.abs());
            sink(j, re as i64);
            sink(j + half, im as i64);
        }
        if max_abs >= ROUND_LIMIT {
            max_error = f64::INFINITY;
        }
        if max_error > self.threshold {
            return Err(Error::PrecisionFault {
                max_error,
                threshold: self.threshold,
            });
        }
        Ok(())
    }

    /// Negacyclic product through the transform.
    pub fn negacyclic_mul(&self, a: &TorusPoly, b: &TorusPoly) -> Result<TorusPoly> {
        check_same_ring(a, b)?;
        let fa = self.forward(a)?;
        let fb = self.forward(b)?;
        self.inverse(&fa.mul(&fb), a.modulus())
    }
}

fn check_same_ring(a: &TorusPoly, b: &TorusPoly) -> Result<()> {
    if a.degree() != b.degree() || a.modulus() != b.modulus() {
        return Err(Error::ShapeMismatch(format!(
            "operands live in different rings (N = {} / {}, log2 q = {} / {})",
            a.degree(),
            b.degree(),
            a.modulus().log2(),
            b.modulus().log2()
        )));
    }
    Ok(())
}

/// Schoolbook product in `Z_q[X]/(X^N + 1)`.
pub fn negacyclic_mul_naive(a: &TorusPoly, b: &TorusPoly) -> Result<TorusPoly> {
    check_same_ring(a, b)?;
    let n = a.degree();
    let q = a.modulus();
    let mut out = vec![0u64; n];
    for (i, &x) in a.coeffs().iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs().iter().enumerate() {
            let prod = x.wrapping_mul(y);
            let k = i + j;
            if k < n {
                out[k] = out[k].wrapping_add(prod);
            } else {
                out[k - n] = out[k - n].wrapping_sub(prod);
            }
        }
    }
    TorusPoly::from_coeffs(out, q)
}
