//! Portable seeded sampling of random fields.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`), and normals come from
//! `rand_distr::StandardNormal`. Each coefficient of `P` then `Q`, in monomial order, is
//! `(g1 + i g2) / sqrt(2)` with independent standard normals `g1, g2`, so `E|c|^2 = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::foliation::VectorField;
use crate::numkernel::{monomial_count, C64};

/// Seeded ChaCha20 generator used for every random draw in the crate.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One standard complex normal draw.
pub fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `count` standard complex normal draws.
pub fn complex_normals<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count).map(|_| complex_normal(rng)).collect()
}

/// Random field of the given degree with i.i.d. standard complex normal coefficients.
pub fn random_field(seed: u64, degree: usize) -> VectorField {
    assert!(degree >= 1, "degree must be at least 1");
    let mut r = rng(seed);
    let m = monomial_count(degree);
    let p = complex_normals(&mut r, m);
    let q = complex_normals(&mut r, m);
    VectorField::from_coeffs(degree, p, q).expect("random coefficients are nonzero")
}
