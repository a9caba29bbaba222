//! Signed gadget decomposition.
//!
//! A coefficient is rounded to its top `l * log2(B)` bits and then split into
//! `l` balanced digits `d_1..d_l` in `[-B/2, B/2)` such that
//! `sum_i d_i * q / B^i` equals the rounded value. Digit 1 is the most
//! significant.

use crate::error::{Error, Result};
use crate::torus::{Modulus, TorusPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposer {
    base_log: u32,
    level: usize,
    modulus: Modulus,
}

impl Decomposer {
    pub fn new(base: u64, level: usize, modulus: Modulus) -> Result<Self> {
        if base < 2 || !base.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "decomposition base {base} is not a power of two >= 2"
            )));
        }
        let base_log = base.trailing_zeros();
        if level == 0 || level as u64 * base_log as u64 > modulus.log2() as u64 {
            return Err(Error::InvalidParameter(format!(
                "{level} levels of base 2^{base_log} overflow a 2^{} modulus",
                modulus.log2()
            )));
        }
        Ok(Decomposer {
            base_log,
            level,
            modulus,
        })
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.level
    }

    #[inline]
    pub fn base_log(&self) -> u32 {
        self.base_log
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `q / B^level_index` for a 1-based level index, as an element of `Z_q`.
    #[inline]
    pub fn weight(&self, level_index: usize) -> u64 {
        let shift = self.modulus.log2() - self.base_log * level_index as u32;
        1u64 << shift
    }

    /// Coefficient rounded to the nearest multiple of `q / B^l`.
    #[inline]
    pub fn closest_representable(&self, a: u64) -> u64 {
        let shift = self.modulus.log2() - self.base_log * self.level as u32;
        if shift == 0 {
            return a;
        }
        let rounded = (a as u128 + (1u128 << (shift - 1))) >> shift;
        self.modulus.reduce((rounded << shift) as u64)
    }

    #[inline]
    fn rounded_top(&self, a: u64) -> u64 {
        let shift = self.modulus.log2() - self.base_log * self.level as u32;
        match shift {
            0 => a,
            // a < 2^63 here, so the rounding offset cannot overflow
            _ if self.modulus.log2() < 64 => (a + (1 << (shift - 1))) >> shift,
            _ => ((a as u128 + (1u128 << (shift - 1))) >> shift) as u64,
        }
    }

    /// One balanced digit off the bottom of `state`, carrying into the rest.
    #[inline]
    fn next_digit(&self, state: &mut u64) -> i64 {
        let mask = (1u64 << self.base_log) - 1;
        let half = 1u64 << (self.base_log - 1);
        let raw = *state & mask;
        let carry = u64::from(raw >= half);
        *state = (*state >> self.base_log) + carry;
        raw as i64 - ((carry as i64) << self.base_log)
    }

    /// Writes the digits of `a` into `out[0..level]`, most significant first.
    #[inline]
    pub fn decompose_scalar(&self, a: u64, out: &mut [i64]) {
        let mut state = self.rounded_top(a);
        for slot in out[..self.level].iter_mut().rev() {
            *slot = self.next_digit(&mut state);
        }
    }

    /// Digits of every coefficient: `out[l][i]` is digit `l+1` of `coeffs[i]`.
    pub fn decompose_into(&self, coeffs: &[u64], out: &mut [Vec<i64>]) {
        debug_assert_eq!(out.len(), self.level);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut state = self.rounded_top(c);
            for row in out.iter_mut().rev() {
                row[i] = self.next_digit(&mut state);
            }
        }
    }

    /// Signed digit polynomials, digit values embedded in `Z_q`.
    pub fn decompose_poly(&self, p: &TorusPoly) -> Result<Vec<TorusPoly>> {
        if p.modulus() != self.modulus {
            return Err(Error::ShapeMismatch(
                "polynomial modulus differs from the decomposer's".into(),
            ));
        }
        let mut rows = vec![vec![0i64; p.degree()]; self.level];
        self.decompose_into(p.coeffs(), &mut rows);
        rows.iter()
            .map(|r| TorusPoly::from_signed(r, self.modulus))
            .collect()
    }

    /// `sum_i d_i * q / B^i` in `Z_q`.
    pub fn recompose(&self, digits: &[i64]) -> u64 {
        let q = self.modulus;
        digits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &d)| q.add(acc, q.mul(q.from_i64(d), self.weight(i + 1))))
    }
}

/// Decomposes `p` into `level` digit polynomials in base `base`.
pub fn gadget_decompose(p: &TorusPoly, level: usize, base: u64) -> Result<Vec<TorusPoly>> {
    Decomposer::new(base, level, p.modulus())?.decompose_poly(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Modulus = Modulus::Q32;

    #[test]
    fn zero_gives_zero_digits() {
        let p = TorusPoly::zero(8, Q);
        for d in gadget_decompose(&p, 3, 1 << 7).unwrap() {
            assert!(d.is_zero());
        }
    }

    #[test]
    fn q_over_b_is_one_then_zero() {
        let dec = Decomposer::new(1 << 8, 2, Q).unwrap();
        let mut out = [0i64; 2];
        dec.decompose_scalar(1 << 24, &mut out);
        assert_eq!(out, [1, 0]);
        assert_eq!(dec.recompose(&out), 1 << 24);
    }

    #[test]
    fn top_value_carries_out() {
        // q - 1 rounds to q == 0
        let dec = Decomposer::new(1 << 8, 2, Q).unwrap();
        let mut out = [0i64; 2];
        dec.decompose_scalar(u32::MAX as u64, &mut out);
        assert_eq!(dec.recompose(&out), 0);
    }

    #[test]
    fn rejects_overflowing_levels() {
        assert!(Decomposer::new(1 << 8, 5, Q).is_err());
        assert!(Decomposer::new(6, 2, Q).is_err());
        assert!(Decomposer::new(1 << 16, 4, Modulus::Q64).is_ok());
        assert!(Decomposer::new(1 << 16, 2, Q).is_ok());
    }

    #[test]
    fn full_width_decomposition_is_exact() {
        let dec = Decomposer::new(1 << 8, 4, Q).unwrap();
        let mut out = [0i64; 4];
        for a in [0u64, 1, 12345, 0xdead_beef, u32::MAX as u64] {
            dec.decompose_scalar(a, &mut out);
            assert_eq!(dec.recompose(&out), a);
        }
    }

    proptest! {
        #[test]
        fn digits_balanced_and_error_bounded(a in any::<u32>(), base_log in 1u32..=10, level in 1usize..=3) {
            prop_assume!(base_log as usize * level <= 32);
            let dec = Decomposer::new(1 << base_log, level, Q).unwrap();
            let mut out = [0i64; 3];
            dec.decompose_scalar(a as u64, &mut out);
            let half = 1i64 << (base_log - 1);
            for &d in &out[..level] {
                prop_assert!((-half..half).contains(&d));
            }
            let back = dec.recompose(&out[..level]);
            prop_assert_eq!(back, dec.closest_representable(a as u64));
            let err = Q.to_i64(Q.sub(a as u64, back)).unsigned_abs();
            let bound = 1u64 << (32 - base_log * level as u32) >> 1;
            prop_assert!(err <= bound);
        }

        #[test]
        fn sixty_four_bit_bound(a in any::<u64>()) {
            let q = Modulus::Q64;
            let dec = Decomposer::new(1 << 15, 2, q).unwrap();
            let mut out = [0i64; 2];
            dec.decompose_scalar(a, &mut out);
            let err = q.to_i64(q.sub(a, dec.recompose(&out))).unsigned_abs();
            prop_assert!(err <= 1u64 << 33);
        }
    }
}
