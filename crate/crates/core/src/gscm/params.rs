use serde::{Deserialize, Serialize};

use crate::data::{self, parse_toml};
use crate::error::{check_range, Error, Result};
use crate::scenario::{LinkState, ScenarioKind};

/// Frequency argument of an affine table entry; fc in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreqArg {
    #[serde(rename = "log10(1+fc)")]
    Log1p,
    #[serde(rename = "log10(fc)")]
    Log,
}

/// Table value: a constant or `c + k * arg(fc)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FreqExpr {
    Const(f64),
    Affine { c: f64, k: f64, arg: FreqArg },
}

impl FreqExpr {
    pub fn eval(&self, fc_ghz: f64) -> f64 {
        match *self {
            FreqExpr::Const(v) => v,
            FreqExpr::Affine { c, k, arg } => {
                let x = match arg {
                    FreqArg::Log1p => (1.0 + fc_ghz).log10(),
                    FreqArg::Log => fc_ghz.log10(),
                };
                c + k * x
            }
        }
    }
}

impl From<f64> for FreqExpr {
    fn from(v: f64) -> Self {
        FreqExpr::Const(v)
    }
}

/// One (scenario, state) row of the parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub scenario: ScenarioKind,
    pub state: LinkState,
    pub fc_max_ghz: f64,
    pub ds_mu: FreqExpr,
    pub ds_sigma: FreqExpr,
    pub asd_mu: FreqExpr,
    pub asd_sigma: FreqExpr,
    pub asa_mu: FreqExpr,
    pub asa_sigma: FreqExpr,
    pub zsa_mu: FreqExpr,
    pub zsa_sigma: FreqExpr,
    pub zsd_mu: FreqExpr,
    pub zsd_sigma: FreqExpr,
    pub shadow_sigma_db: f64,
    pub clusters: usize,
    #[serde(default = "default_rays")]
    pub rays: usize,
    pub r_tau: f64,
    pub zeta_db: f64,
    pub c_asd_deg: f64,
    pub c_asa_deg: f64,
    pub c_zsa_deg: f64,
    pub xpr_mu_db: f64,
    pub xpr_sigma_db: f64,
    #[serde(default)]
    pub k_mu_db: Option<f64>,
    #[serde(default)]
    pub k_sigma_db: Option<f64>,
}

fn default_rays() -> usize {
    RAYS_PER_CLUSTER
}

/// Sub-paths per cluster.
pub const RAYS_PER_CLUSTER: usize = 20;

/// Index of each large-scale parameter in [`LspStatistics`] arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lsp {
    Ds = 0,
    Asd = 1,
    Asa = 2,
    Zsa = 3,
    Zsd = 4,
}

/// Table row evaluated at one carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LspStatistics {
    /// log10 means, indexed by [`Lsp`].
    pub mu: [f64; 5],
    /// log10 standard deviations, indexed by [`Lsp`].
    pub sigma: [f64; 5],
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::invalid("cluster count must be >= 1"));
        }
        if self.rays != RAYS_PER_CLUSTER {
            return Err(Error::invalid(format!(
                "clusters use {RAYS_PER_CLUSTER} rays, got {}",
                self.rays
            )));
        }
        if !(self.r_tau > 1.0) {
            return Err(Error::invalid(format!("r_tau must be > 1, got {}", self.r_tau)));
        }
        if self.zeta_db < 0.0 || self.shadow_sigma_db < 0.0 || self.xpr_sigma_db < 0.0 {
            return Err(Error::invalid("standard deviations must be >= 0"));
        }
        if self.state == LinkState::Los && self.k_mu_db.is_none() {
            return Err(Error::invalid(format!(
                "{} LOS entry needs Ricean K statistics",
                self.scenario
            )));
        }
        Ok(())
    }

    /// Evaluate the lognormal statistics at `fc_ghz`.
    pub fn statistics(&self, fc_ghz: f64) -> Result<LspStatistics> {
        check_range("parameter table", "f_c (GHz)", fc_ghz, 0.5, self.fc_max_ghz)?;
        let mu = [&self.ds_mu, &self.asd_mu, &self.asa_mu, &self.zsa_mu, &self.zsd_mu].map(|e| e.eval(fc_ghz));
        let sigma = [
            &self.ds_sigma,
            &self.asd_sigma,
            &self.asa_sigma,
            &self.zsa_sigma,
            &self.zsd_sigma,
        ]
        .map(|e| e.eval(fc_ghz));
        if sigma.iter().any(|s| *s < 0.0) {
            return Err(Error::invalid(format!(
                "{} {}: negative log-spread sigma at {fc_ghz} GHz",
                self.scenario, self.state
            )));
        }
        Ok(LspStatistics { mu, sigma })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    format_version: u32,
    entry: Vec<ScenarioParams>,
}

/// All (scenario, state) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParameterTable {
    entries: Vec<ScenarioParams>,
}

impl ScenarioParameterTable {
    pub fn new(entries: Vec<ScenarioParams>) -> Result<Self> {
        for e in &entries {
            e.validate()?;
        }
        Ok(Self { entries })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TableFile = parse_toml(data::SCENARIO_PARAMS, text)?;
        if file.format_version != 1 {
            return Err(data::data_error(
                data::SCENARIO_PARAMS,
                format!("unsupported format_version {}", file.format_version),
            ));
        }
        Self::new(file.entry).map_err(|e| data::data_error(data::SCENARIO_PARAMS, e.to_string()))
    }

    /// Table from the active data directory (or the bundled copy).
    pub fn load() -> Result<Self> {
        Self::from_toml_str(&data::load(data::SCENARIO_PARAMS)?)
    }

    pub fn entries(&self) -> &[ScenarioParams] {
        &self.entries
    }

    pub fn get(&self, scenario: ScenarioKind, state: LinkState) -> Result<&ScenarioParams> {
        self.entries
            .iter()
            .find(|e| e.scenario == scenario && e.state == state)
            .ok_or_else(|| Error::MissingTableEntry {
                scenario: scenario.to_string(),
                state: state.to_string(),
            })
    }

    pub fn get_mut(&mut self, scenario: ScenarioKind, state: LinkState) -> Result<&mut ScenarioParams> {
        self.entries
            .iter_mut()
            .find(|e| e.scenario == scenario && e.state == state)
            .ok_or_else(|| Error::MissingTableEntry {
                scenario: scenario.to_string(),
                state: state.to_string(),
            })
    }
}
