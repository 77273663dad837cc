//! Link-state effects: LOS probability, oxygen absorption, outdoor-to-indoor
//! penetration and a simple angular blockage model.

mod blockage;
mod o2i;
mod oxygen;

pub use blockage::{blockage_attenuation, BlockTarget, BlockerRegion, ClusterDirection};
pub use o2i::{o2i_loss, MaterialComponent, MaterialMix, O2iLoss};
pub use oxygen::{oxygen_loss, OxygenTable};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::LinkState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LosModel {
    #[serde(rename = "UMi-3GPP")]
    Umi3gpp,
    #[serde(rename = "UMa-3GPP")]
    Uma3gpp,
    #[serde(rename = "NYU-squared")]
    NyuSquared,
}

/// d1/d2 LOS probability model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosProbParams {
    #[serde(default = "default_d1")]
    pub d1: f64,
    #[serde(default = "default_d2")]
    pub d2: f64,
    pub model: LosModel,
}

fn default_d1() -> f64 {
    18.0
}

fn default_d2() -> f64 {
    36.0
}

impl LosProbParams {
    pub fn new(model: LosModel) -> Self {
        Self {
            d1: default_d1(),
            d2: default_d2(),
            model,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d1 > 0.0 && self.d2 > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "LOS probability needs d1, d2 > 0, got d1={}, d2={}",
                self.d1, self.d2
            )))
        }
    }
}

/// Height above which the UMa correction is frozen.
const UMA_MAX_HR: f64 = 23.0;

/// Probability that an outdoor link at ground distance `d2d_out` is LOS.
///
/// For UMa, terminal heights above 23 m use the 23 m correction and log a
/// warning. The result is clamped to [0, 1].
pub fn los_probability(params: &LosProbParams, d2d_out: f64, h_r: f64) -> f64 {
    let d = d2d_out.max(0.0);
    let base = d1d2(params.d1, params.d2, d);
    let p = match params.model {
        LosModel::Umi3gpp => base,
        LosModel::Uma3gpp => {
            let h = if h_r > UMA_MAX_HR {
                log::warn!("UMa LOS probability: h_r = {h_r} m above {UMA_MAX_HR} m, using {UMA_MAX_HR} m");
                UMA_MAX_HR
            } else {
                h_r
            };
            base * (1.0 + uma_correction(d, h))
        }
        LosModel::NyuSquared => base * base,
    };
    p.clamp(0.0, 1.0)
}

fn d1d2(d1: f64, d2: f64, d: f64) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let e = (-d / d2).exp();
    (d1 / d).min(1.0) * (1.0 - e) + e
}

fn uma_correction(d: f64, h_r: f64) -> f64 {
    if h_r < 13.0 {
        return 0.0;
    }
    let g = if d > 18.0 {
        1.25e-6 * d * d * (-d / 150.0).exp()
    } else {
        0.0
    };
    ((h_r - 13.0) / 10.0).powf(1.5) * g
}

/// Bernoulli draw of the link state.
pub fn draw_los_state<R: Rng + ?Sized>(p: f64, rng: &mut R) -> LinkState {
    let u: f64 = rng.random();
    if u < p {
        LinkState::Los
    } else {
        LinkState::Nlos
    }
}
