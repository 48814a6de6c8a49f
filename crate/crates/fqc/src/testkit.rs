//! Test-only helpers: an independent matrix exponential and a seeded rng.
//!
//! `expm` is a plain Taylor series with scaling and squaring. It is slow and
//! simple on purpose: the closed-form exponentials in the library must agree
//! with a route that shares none of their code.

use crate::linalg::{c64, identity, CMat};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn expm(a: &CMat) -> CMat {
    let norm: f64 = a.iter().map(|v| v.norm()).sum();
    let scale = norm.log2().ceil().max(0.0) as u32 + 1;
    let factor = c64(1.0 / f64::powi(2.0, scale as i32), 0.0);
    let small = a.mapv(|v| v * factor);
    let mut sum = identity(a.nrows());
    let mut term = identity(a.nrows());
    for k in 1..=25 {
        term = term.dot(&small).mapv(|v| v / c64(k as f64, 0.0));
        sum = sum + &term;
    }
    let mut out = sum;
    for _ in 0..scale {
        out = out.dot(&out);
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn exponential_of_pauli_x_generator() {
        // exp(i t X) = cos(t) I + i sin(t) X.
        let t = 0.9f64;
        let mut gen = CMat::zeros((2, 2));
        gen[[0, 1]] = c64(0.0, t);
        gen[[1, 0]] = c64(0.0, t);
        let got = expm(&gen);
        let mut want = CMat::zeros((2, 2));
        want[[0, 0]] = c64(t.cos(), 0.0);
        want[[1, 1]] = c64(t.cos(), 0.0);
        want[[0, 1]] = c64(0.0, t.sin());
        want[[1, 0]] = c64(0.0, t.sin());
        assert!(max_abs_diff(&got, &want) < 1e-13);
    }
}
