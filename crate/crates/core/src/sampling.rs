//! Seeded random sampling of components, parameter sets and constants.
//!
//! All randomized checks in this crate draw from [`SampleRng`] seeded
//! explicitly, so every run is reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{CVec4, Complex, ParamSet};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

/// Derives a stable sub-seed from a parent seed and a label (FNV-1a).
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    seed.to_le_bytes()
        .iter()
        .chain(label.as_bytes())
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

/// Uniform on the square `[-1, 1]²` of the complex plane.
pub fn random_complex(rng: &mut SampleRng) -> Complex {
    Complex::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// A random 4-vector. With `real` set the second component is purely
/// imaginary and the others real, so the generated block is real.
pub fn random_cvec4(rng: &mut SampleRng, real: bool) -> CVec4 {
    if real {
        let mut x = [0.0; 4];
        for xi in &mut x {
            *xi = rng.gen_range(-1.0..=1.0);
        }
        CVec4::new(
            x[0].into(),
            x[1].into(),
            Complex::new(0.0, x[2]),
            x[3].into(),
        )
    } else {
        CVec4::new(
            random_complex(rng),
            random_complex(rng),
            random_complex(rng),
            random_complex(rng),
        )
    }
}

pub fn random_params(rng: &mut SampleRng, real: bool) -> ParamSet {
    ParamSet {
        k: random_cvec4(rng, real),
        m: random_cvec4(rng, real),
        l: random_cvec4(rng, real),
        n: random_cvec4(rng, real),
    }
}

/// A family constant with modulus in `[0.5, 2]`: a random phase, or a random
/// sign when `real` is set.
pub fn random_constant(rng: &mut SampleRng, real: bool) -> Complex {
    let modulus = rng.gen_range(0.5..=2.0);
    if real {
        if rng.gen_bool(0.5) {
            modulus.into()
        } else {
            (-modulus).into()
        }
    } else {
        Complex::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
    }
}
