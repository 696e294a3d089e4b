#![allow(dead_code)]

use flucmo_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spectral parameter with `Re z ∈ [-2, 2]` and `|Im z| ∈ [1, 3]`, random sign.
pub fn random_z(rng: &mut ChaCha8Rng) -> C64 {
    let re = rng.random_range(-2.0..2.0);
    let im = rng.random_range(1.0..3.0);
    C64::new(re, if rng.random_bool(0.5) { im } else { -im })
}

pub fn random_zs(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_z(rng)).collect()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn assert_close(a: C64, b: C64, tol: f64, what: &str) {
    let err = (a - b).norm() / (1.0 + b.norm());
    assert!(err <= tol, "{what}: {a} vs {b} (err {err:e})");
}

/// Proptest strategy with the same range as [`random_z`].
pub fn spectral_point() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, 1.0f64..3.0, any::<bool>()).prop_map(|(re, im, up)| C64::new(re, if up { im } else { -im }))
}
