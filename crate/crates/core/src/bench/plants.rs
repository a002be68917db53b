use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{hinf_norm, FirFilter};

/// Plants whose norm falls below this are redrawn so relative errors stay defined.
pub const MIN_PLANT_NORM: f64 = 1e-6;
const RESEED_STRIDE: u64 = 0x9e37_79b9_7f4a_7c15;
const MAX_RESEEDS: u64 = 64;

/// `g_k = rho^k eta_k`, `eta_k ~ Uniform[-1, 1]` i.i.d. under `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub r: usize,
    pub decay: f64,
    pub seed: u64,
}

fn draw(r: usize, decay: f64, seed: u64) -> Result<FirFilter> {
    let mut stream = rng::stream(&[seed, 0x706c_616e_74]);
    let taps: Vec<f64> = (0..r)
        .map(|k| decay.powi(k as i32) * stream.gen_range(-1.0..=1.0))
        .collect();
    FirFilter::from_real(&taps)
}

/// Draws the plant for `spec`, moving to `seed + i * stride` while the
/// draw has norm below [`MIN_PLANT_NORM`].
pub fn random_plant(spec: &PlantSpec) -> Result<FirFilter> {
    if spec.r == 0 {
        return Err(Error::invalid("plant_length", "must be at least 1"));
    }
    if !(spec.decay > 0.0 && spec.decay <= 1.0) {
        return Err(Error::invalid(
            "decay",
            format!("must lie in (0, 1], got {}", spec.decay),
        ));
    }
    for i in 0..MAX_RESEEDS {
        let g = draw(
            spec.r,
            spec.decay,
            spec.seed.wrapping_add(i.wrapping_mul(RESEED_STRIDE)),
        )?;
        if hinf_norm(&g, 1e-9)?.value >= MIN_PLANT_NORM {
            return Ok(g);
        }
    }
    Err(Error::invalid(
        "decay",
        "every reseeded plant had negligible norm",
    ))
}
