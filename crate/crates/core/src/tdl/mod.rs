//! Non-directional tapped-delay-line fading (COST 207 / ITU-R M.1225).

mod doppler;

pub use doppler::{doppler_spectrum_eval, fading_process, DopplerShape};

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, parse_toml};
use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Environment {
    #[serde(rename = "TU")]
    TypicalUrban,
    #[serde(rename = "BU")]
    BadUrban,
    #[serde(rename = "RA")]
    RuralArea,
    #[serde(rename = "HT")]
    HillyTerrain,
    #[serde(rename = "ITU-indoor")]
    ItuIndoor,
    #[serde(rename = "ITU-vehicular")]
    ItuVehicular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Excess delay, s.
    pub delay: f64,
    /// Linear power.
    pub power: f64,
    pub shape: DopplerShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapProfile {
    pub environment: Environment,
    pub taps: Vec<Tap>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    format_version: u32,
    profile: BTreeMap<String, ProfileEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    environment: Environment,
    taps: Vec<TapEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TapEntry {
    delay_us: f64,
    power_db: f64,
    doppler: ShapeEntry,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ShapeEntry {
    Named(String),
    Gauss { gauss: [f64; 2] },
}

impl ShapeEntry {
    /// Resolve against maximum Doppler `f_d` (Gaussian values are in f_d units).
    fn resolve(&self, f_d: f64) -> Result<DopplerShape> {
        match self {
            ShapeEntry::Named(n) if n == "bathtub" => Ok(DopplerShape::Bathtub { f_d }),
            ShapeEntry::Named(n) if n == "flat" => Ok(DopplerShape::Flat { f_d }),
            ShapeEntry::Named(n) => Err(Error::invalid(format!("unknown Doppler shape '{n}'"))),
            ShapeEntry::Gauss { gauss: [c, s] } => Ok(DopplerShape::Gaussian {
                center: c * f_d,
                std: s * f_d,
            }),
        }
    }
}

impl TapProfile {
    pub fn new(environment: Environment, taps: Vec<Tap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("tap profile needs at least one tap"));
        }
        if taps.iter().any(|t| !(t.delay >= 0.0) || !(t.power > 0.0)) {
            return Err(Error::invalid("tap delays must be >= 0 and powers > 0"));
        }
        if taps.windows(2).any(|w| w[1].delay < w[0].delay) {
            return Err(Error::invalid("tap delays must be ascending"));
        }
        for t in &taps {
            t.shape.validate()?;
        }
        Ok(Self { environment, taps })
    }

    /// Profile `name` from profile-file text, for maximum Doppler `f_d` (Hz).
    pub fn parse(text: &str, name: &str, f_d: f64) -> Result<Self> {
        let file: ProfileFile = parse_toml(data::TDL_PROFILES, text)?;
        if file.format_version != 1 {
            return Err(data::data_error(
                data::TDL_PROFILES,
                format!("unsupported format_version {}", file.format_version),
            ));
        }
        let entry = file
            .profile
            .get(name)
            .ok_or_else(|| Error::invalid(format!("unknown tap profile '{name}'")))?;
        let taps = entry
            .taps
            .iter()
            .map(|t| {
                Ok(Tap {
                    delay: t.delay_us * 1e-6,
                    power: 10f64.powf(t.power_db / 10.0),
                    shape: t.doppler.resolve(f_d)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entry.environment, taps)
    }

    /// Bundled (or `CHANSIM_DATA`) profile.
    pub fn load(name: &str, f_d: f64) -> Result<Self> {
        Self::parse(&data::load(data::TDL_PROFILES)?, name, f_d)
    }

    /// Same profile with powers scaled to sum to one.
    pub fn normalized(&self) -> Self {
        let total: f64 = self.taps.iter().map(|t| t.power).sum();
        Self {
            environment: self.environment,
            taps: self
                .taps
                .iter()
                .map(|t| Tap {
                    power: t.power / total,
                    ..*t
                })
                .collect(),
        }
    }

    /// Power-weighted rms delay spread, s.
    pub fn rms_delay_spread(&self) -> f64 {
        let p: f64 = self.taps.iter().map(|t| t.power).sum();
        let m1 = self.taps.iter().map(|t| t.power * t.delay).sum::<f64>() / p;
        let m2 = self.taps.iter().map(|t| t.power * t.delay * t.delay).sum::<f64>() / p;
        (m2 - m1 * m1).max(0.0).sqrt()
    }
}

/// Uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub duration: f64,
    pub sample_rate: f64,
}

impl TimeGrid {
    pub fn len(&self) -> usize {
        (self.duration * self.sample_rate).round().max(1.0) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| i as f64 / self.sample_rate).collect()
    }
}

/// Tap gains `h(t, τ_n) = √P_n g_n(t)`, one row per tap.
#[derive(Debug, Clone, PartialEq)]
pub struct TapRealization {
    pub delays: Vec<f64>,
    pub times: Vec<f64>,
    pub gains: Vec<Vec<Complex64>>,
}

impl TapRealization {
    /// Write `t_s,tap_index,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t_s,tap_index,re,im")?;
        for (k, t) in self.times.iter().enumerate() {
            for (n, g) in self.gains.iter().enumerate() {
                writeln!(w, "{t},{n},{},{}", g[k].re, g[k].im)?;
            }
        }
        Ok(())
    }
}

/// Independent fading per tap; each tap uses its own RNG stream derived
/// from one draw of `rng`.
pub fn tdl_impulse_response<R: Rng + ?Sized>(
    profile: &TapProfile,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<TapRealization> {
    let base: u64 = rng.random();
    let gains = profile
        .taps
        .par_iter()
        .enumerate()
        .map(|(n, tap)| {
            let mut r = stream(base, n as u64);
            let g = fading_process(&tap.shape, grid.duration, grid.sample_rate, &mut r)?;
            let a = tap.power.sqrt();
            Ok(g.into_iter().map(|x| x * a).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    Ok(TapRealization {
        delays: profile.taps.iter().map(|t| t.delay).collect(),
        times: grid.times(),
        gains,
    })
}
