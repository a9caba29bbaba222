//! Folded negacyclic FFT against the schoolbook product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strix::torus::{Modulus, TorusPoly};
use strix::transform::{negacyclic_mul_naive, FoldedFft};

fn main() -> strix::Result<()> {
    let q = Modulus::Q32;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [8, 64, 1024] {
        let fft = FoldedFft::new(n)?;
        let digits: Vec<i64> = (0..n).map(|_| rng.random_range(-128..128)).collect();
        let a = TorusPoly::from_signed(&digits, q)?;
        let b = TorusPoly::from_coeffs((0..n).map(|_| rng.random::<u32>() as u64).collect(), q)?;
        let fast = fft.negacyclic_mul(&a, &b)?;
        let slow = negacyclic_mul_naive(&a, &b)?;
        println!("N={n:5}: {} complex points, exact match: {}", fft.degree() / 2, fast == slow);
    }
    Ok(())
}
