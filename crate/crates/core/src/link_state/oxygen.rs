use std::collections::BTreeMap;

use serde::Deserialize;

use crate::data::{self, parse_toml};
use crate::error::{check_range, Error, Result};
use crate::scenario::SPEED_OF_LIGHT;

/// Sampled specific attenuation α(f), dB/km, interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct OxygenTable {
    f_ghz: Vec<f64>,
    alpha: Vec<f64>,
}

#[derive(Debug, Deserialize)]
pub(crate) struct AtmosFile {
    #[allow(dead_code)]
    pub format_version: u32,
    pub absorption: AbsorptionSamples,
    #[serde(default)]
    pub material: BTreeMap<String, MaterialCoeffs>,
    #[serde(default)]
    pub preset: BTreeMap<String, PresetEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct AbsorptionSamples {
    pub f_ghz: Vec<f64>,
    pub alpha_db_per_km: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct MaterialCoeffs {
    pub a_db: f64,
    pub b_db_per_ghz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PresetEntry {
    pub components: Vec<(f64, String)>,
    pub pl_npi_db: f64,
    pub sigma_p_db: f64,
    pub indoor_db_per_m: f64,
}

pub(crate) fn load_atmos() -> Result<AtmosFile> {
    let text = data::load(data::ATMOS_MATERIALS)?;
    parse_toml(data::ATMOS_MATERIALS, &text)
}

impl OxygenTable {
    pub const MIN_GHZ: f64 = 0.5;
    pub const MAX_GHZ: f64 = 100.0;

    pub fn from_samples(f_ghz: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if f_ghz.len() != alpha.len() || f_ghz.len() < 2 {
            return Err(Error::invalid(
                "absorption table needs matching f/alpha arrays of length >= 2",
            ));
        }
        if f_ghz.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "absorption table frequencies must be strictly ascending",
            ));
        }
        if alpha.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::invalid("absorption values must be >= 0"));
        }
        if f_ghz[0] > Self::MIN_GHZ || *f_ghz.last().unwrap() < Self::MAX_GHZ {
            return Err(Error::invalid(format!(
                "absorption table must cover [{}, {}] GHz",
                Self::MIN_GHZ,
                Self::MAX_GHZ
            )));
        }
        Ok(Self { f_ghz, alpha })
    }

    /// Table from the active data directory (or the bundled copy).
    pub fn load() -> Result<Self> {
        let file = load_atmos()?;
        Self::from_samples(file.absorption.f_ghz, file.absorption.alpha_db_per_km)
            .map_err(|e| data::data_error(data::ATMOS_MATERIALS, e.to_string()))
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.f_ghz.iter().copied().zip(self.alpha.iter().copied())
    }

    /// α(f) in dB/km.
    pub fn alpha(&self, f_ghz: f64) -> Result<f64> {
        let lo = self.f_ghz[0];
        let hi = *self.f_ghz.last().unwrap();
        check_range("oxygen absorption", "f (GHz)", f_ghz, lo, hi)?;
        let i = self.f_ghz.partition_point(|&x| x <= f_ghz);
        if i == self.f_ghz.len() {
            return Ok(*self.alpha.last().unwrap());
        }
        let (f0, f1) = (self.f_ghz[i - 1], self.f_ghz[i]);
        let (a0, a1) = (self.alpha[i - 1], self.alpha[i]);
        Ok(a0 + (a1 - a0) * (f_ghz - f0) / (f1 - f0))
    }

    /// Frequencies of the interior sample maxima.
    pub fn local_maxima(&self) -> Vec<f64> {
        (1..self.alpha.len() - 1)
            .filter(|&i| self.alpha[i] > self.alpha[i - 1] && self.alpha[i] >= self.alpha[i + 1])
            .map(|i| self.f_ghz[i])
            .collect()
    }
}

/// Absorption along a cluster's path: `α(f)/1000 · (d + c(τ_n + τ_Δ))`, dB.
pub fn oxygen_loss(tbl: &OxygenTable, f_ghz: f64, d3d: f64, tau_n: f64, tau_delta: f64) -> Result<f64> {
    if d3d < 0.0 || tau_n < 0.0 || tau_delta < 0.0 {
        return Err(Error::invalid("oxygen loss arguments must be non-negative"));
    }
    let alpha = tbl.alpha(f_ghz)?;
    Ok(alpha / 1000.0 * (d3d + SPEED_OF_LIGHT * (tau_n + tau_delta)))
}
