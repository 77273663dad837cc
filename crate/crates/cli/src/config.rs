use std::path::{Path, PathBuf};

use chansim_core::antenna::AntennaArraySpec;
use chansim_core::gscm::{LinkConfig, ModelData, O2iSettings, PathlossChoice, StatePolicy};
use chansim_core::link_state::{BlockerRegion, LosModel, LosProbParams, MaterialMix};
use chansim_core::scenario::Velocity;
use chansim_core::spatial::Trajectory;
use chansim_core::{CarrierSpec, LinkState, Position3D, ScenarioKind};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "default_drops")]
    pub drops: usize,
    /// Not part of the config hash.
    #[serde(default = "default_out", skip_serializing)]
    pub output_dir: PathBuf,
    pub link: LinkSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub los: Option<LosProbParams>,
    /// Isotropic single element when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx: Option<AntennaArraySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx: Option<AntennaArraySpec>,
    #[serde(default)]
    pub features: Features,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o2i: Option<O2iSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blockage: Vec<BlockerRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySection>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub figures: FigureSection,
}

fn default_drops() -> usize {
    1000
}

fn default_out() -> PathBuf {
    PathBuf::from("chansim-out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateChoice {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
    #[serde(rename = "O2I")]
    O2i,
    #[serde(rename = "probabilistic")]
    Probabilistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub scenario: ScenarioKind,
    pub state: StateChoice,
    pub f_ghz: f64,
    #[serde(default = "default_bw")]
    pub bandwidth_mhz: f64,
    /// BS position [x, y, z], m.
    pub bs: [f64; 3],
    /// MS position [x, y, z], m.
    pub ms: [f64; 3],
    #[serde(default)]
    pub speed_mps: f64,
    /// Direction of travel, deg azimuth.
    #[serde(default)]
    pub direction_deg: f64,
    #[serde(default)]
    pub pathloss: PathlossChoice,
    /// Coefficient sample times, s.
    #[serde(default = "default_times")]
    pub times_s: Vec<f64>,
}

fn default_bw() -> f64 {
    100.0
}

fn default_times() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Features {
    pub oxygen: bool,
    pub o2i: bool,
    pub blockage: bool,
    /// Emit spatial-consistency tracks with `run`.
    pub sc: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct O2iSection {
    /// Material preset name.
    #[serde(default = "default_material")]
    pub material: String,
    #[serde(default)]
    pub d_in_m: f64,
}

fn default_material() -> String {
    "low-loss".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    /// [x, y, z] points, m.
    pub waypoints: Vec<[f64; 3]>,
    #[serde(default = "default_speed")]
    pub speed_mps: f64,
    #[serde(default = "default_step")]
    pub step_m: f64,
    #[serde(default = "default_corr")]
    pub correlation_distance_m: f64,
}

fn default_speed() -> f64 {
    0.83
}

fn default_step() -> f64 {
    0.1
}

fn default_corr() -> f64 {
    15.0
}

impl TrajectorySection {
    pub fn to_trajectory(&self) -> Trajectory {
        Trajectory {
            waypoints: self.waypoints.iter().map(|&p| Position3D::from(p)).collect(),
            speed: self.speed_mps,
            step: self.step_m,
            correlation_distance: self.correlation_distance_m,
        }
    }
}

/// 5G UMa distance/frequency sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub d_min_m: f64,
    pub d_max_m: f64,
    /// Log-spaced 2D distances.
    pub points: usize,
    pub f_ghz: Vec<f64>,
    pub h_bs_m: f64,
    pub h_ms_m: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            d_min_m: 10.0,
            d_max_m: 4500.0,
            points: 100,
            f_ghz: vec![2.0, 6.0, 28.0, 60.0, 100.0],
            h_bs_m: 25.0,
            h_ms_m: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureSection {
    /// Gain-map grid step, deg.
    pub grid_step_deg: f64,
    pub o2i_f_ghz: Vec<f64>,
    pub o2i_draws: usize,
}

impl Default for FigureSection {
    fn default() -> Self {
        Self {
            grid_step_deg: 0.5,
            o2i_f_ghz: vec![2.0, 4.0, 6.0, 10.0, 20.0, 28.0, 40.0, 60.0, 80.0, 100.0],
            o2i_draws: 1000,
        }
    }
}

/// Read, parse and validate a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let l = &self.link;
        let bad = |m: String| Err(CliError::Config(m));
        if self.drops == 0 {
            return bad("drops must be >= 1".into());
        }
        if l.times_s.is_empty() || l.times_s.iter().any(|t| !t.is_finite()) {
            return bad("link.times_s needs at least one finite time".into());
        }
        if !(l.speed_mps >= 0.0) {
            return bad(format!("link.speed_mps must be >= 0 (got {})", l.speed_mps));
        }
        CarrierSpec::new(l.f_ghz * 1e9, l.bandwidth_mhz * 1e6)?;
        if let Some(a) = &self.tx {
            a.validate()?;
        }
        if let Some(a) = &self.rx {
            a.validate()?;
        }
        self.state_policy()?;
        if self.features.o2i {
            self.o2i_settings()?;
        }
        for b in &self.blockage {
            b.validate()?;
        }
        if let Some(t) = &self.trajectory {
            t.to_trajectory().validate()?;
        }
        if self.sweep.points == 0 || !(self.sweep.d_min_m > 0.0 && self.sweep.d_max_m >= self.sweep.d_min_m) {
            return bad("sweep needs points >= 1 and 0 < d_min_m <= d_max_m".into());
        }
        // the parameter table carries the per-scenario frequency limits
        let data = ModelData::load()?;
        for s in self.states() {
            data.params.get(l.scenario, s)?.statistics(l.f_ghz)?;
        }
        Ok(())
    }

    /// Link states a run can produce.
    pub fn states(&self) -> Vec<LinkState> {
        match self.link.state {
            StateChoice::Los => vec![LinkState::Los],
            StateChoice::Nlos => vec![LinkState::Nlos],
            StateChoice::O2i => vec![LinkState::O2i],
            StateChoice::Probabilistic => vec![LinkState::Los, LinkState::Nlos],
        }
    }

    pub fn state_policy(&self) -> Result<StatePolicy> {
        Ok(match self.link.state {
            StateChoice::Los => StatePolicy::Forced(LinkState::Los),
            StateChoice::Nlos => StatePolicy::Forced(LinkState::Nlos),
            StateChoice::O2i => StatePolicy::Forced(LinkState::O2i),
            StateChoice::Probabilistic => StatePolicy::Probabilistic(match self.los {
                Some(p) => p,
                None => match self.link.scenario {
                    ScenarioKind::UmiStreetCanyon => LosProbParams::new(LosModel::Umi3gpp),
                    ScenarioKind::Uma => LosProbParams::new(LosModel::Uma3gpp),
                    s => {
                        return Err(CliError::Config(format!(
                            "probabilistic state for {} needs a [los] section",
                            s.name()
                        )))
                    }
                },
            }),
        })
    }

    fn o2i_settings(&self) -> Result<Option<O2iSettings>> {
        if !self.features.o2i {
            return Ok(None);
        }
        let s = self.o2i.clone().unwrap_or(O2iSection {
            material: default_material(),
            d_in_m: 0.0,
        });
        Ok(Some(O2iSettings {
            mix: MaterialMix::preset(&s.material)?,
            d_in: s.d_in_m,
        }))
    }

    /// Core link configuration for this run.
    pub fn link_config(&self) -> Result<LinkConfig> {
        let l = &self.link;
        let mut c = LinkConfig::new(
            l.scenario,
            LinkState::Nlos,
            CarrierSpec::new(l.f_ghz * 1e9, l.bandwidth_mhz * 1e6)?,
            Position3D::from(l.bs),
            Position3D::from(l.ms),
        );
        c.state = self.state_policy()?;
        c.velocity = Velocity::horizontal(l.speed_mps, l.direction_deg.to_radians());
        if let Some(a) = self.tx {
            c.tx = a;
        }
        if let Some(a) = self.rx {
            c.rx = a;
        }
        c.times = l.times_s.clone();
        c.pathloss = l.pathloss;
        c.oxygen = self.features.oxygen;
        c.o2i = self.o2i_settings()?;
        if self.features.blockage {
            c.blockage = self.blockage.clone();
        }
        Ok(c)
    }

    /// Configured route, or 10 m along +x then 10 m along +y from the MS.
    pub fn trajectory(&self) -> Trajectory {
        match &self.trajectory {
            Some(t) => t.to_trajectory(),
            None => {
                let [x, y, z] = self.link.ms;
                Trajectory::new(
                    vec![
                        Position3D::new(x, y, z),
                        Position3D::new(x + 10.0, y, z),
                        Position3D::new(x + 10.0, y + 10.0, z),
                    ],
                    default_speed(),
                )
            }
        }
    }

    /// Canonical TOML used for the config hash.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
