//! Seeded additive Gaussian noise.

use elastica_core::ScalarField64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, Result};

/// Zero-mean Gaussian noise with standard deviation `std` in intensity
/// units (`[0, 1]` scale; 20 grey levels of 255 is `20.0 / 255.0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub std: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(std: f64, seed: u64) -> Result<Self> {
        if !(std >= 0.0 && std.is_finite()) {
            return Err(CliError::Argument(format!(
                "noise std must be finite and >= 0, got {std}"
            )));
        }
        Ok(Self { std, seed })
    }

    /// Standard deviation given in 8-bit grey levels.
    pub fn from_grey_levels(levels: f64, seed: u64) -> Result<Self> {
        Self::new(levels / 255.0, seed)
    }
}

/// `f + N(0, std²)` per pixel, row-major draw order. Not clamped.
pub fn add_noise(f: &ScalarField64, spec: &NoiseSpec) -> ScalarField64 {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut out = f.clone();
    for v in out.as_mut_slice() {
        let z: f64 = StandardNormal.sample(&mut rng);
        *v += spec.std * z;
    }
    out
}
