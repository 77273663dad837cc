use nalgebra::{Cholesky, SMatrix, SVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::params::{Lsp, ScenarioParameterTable, ScenarioParams};
use crate::error::{Error, Result};
use crate::scenario::{LinkState, ScenarioKind};

/// Number of jointly drawn large-scale parameters.
pub const LSP_COUNT: usize = 7;

/// Order of the correlated normal vector.
pub const LSP_NAMES: [&str; LSP_COUNT] = ["DS", "ASD", "ASA", "ZSA", "ZSD", "SF", "K"];

/// Cross-correlation between the normal deviates of
/// [DS, ASD, ASA, ZSA, ZSD, SF, K].
#[derive(Debug, Clone, PartialEq)]
pub struct LspCorrelation {
    lower: SMatrix<f64, LSP_COUNT, LSP_COUNT>,
}

impl Default for LspCorrelation {
    fn default() -> Self {
        Self {
            lower: SMatrix::identity(),
        }
    }
}

impl LspCorrelation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// From a symmetric positive-definite matrix with unit diagonal.
    pub fn new(rows: [[f64; LSP_COUNT]; LSP_COUNT]) -> Result<Self> {
        let m = SMatrix::<f64, LSP_COUNT, LSP_COUNT>::from_fn(|i, j| rows[i][j]);
        for i in 0..LSP_COUNT {
            if (m[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("LSP correlation matrix needs a unit diagonal"));
            }
            for j in 0..LSP_COUNT {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 || m[(i, j)].abs() > 1.0 {
                    return Err(Error::invalid(
                        "LSP correlation matrix must be symmetric with |rho| <= 1",
                    ));
                }
            }
        }
        let chol = Cholesky::new(m).ok_or_else(|| Error::invalid("LSP correlation matrix is not positive definite"))?;
        Ok(Self { lower: chol.l() })
    }

    fn correlate(&self, z: SVector<f64, LSP_COUNT>) -> SVector<f64, LSP_COUNT> {
        self.lower * z
    }
}

/// One drop's large-scale parameters. Spreads are kept as drawn, in
/// log10 units; the degree accessors apply the angular caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeScaleParams {
    pub lg_ds: f64,
    pub lg_asd: f64,
    pub lg_asa: f64,
    pub lg_zsa: f64,
    pub lg_zsd: f64,
    /// Shadow fading, dB.
    pub sf_db: f64,
    /// Ricean K, dB (LOS only).
    pub k_db: Option<f64>,
    /// log10 mean of ZSD, sets the intra-cluster ZOD spread.
    pub mu_lg_zsd: f64,
}

impl LargeScaleParams {
    /// Delay spread, s.
    pub fn ds(&self) -> f64 {
        10f64.powf(self.lg_ds)
    }

    pub fn asd_deg(&self) -> f64 {
        10f64.powf(self.lg_asd).min(104.0)
    }

    pub fn asa_deg(&self) -> f64 {
        10f64.powf(self.lg_asa).min(104.0)
    }

    pub fn zsa_deg(&self) -> f64 {
        10f64.powf(self.lg_zsa).min(52.0)
    }

    pub fn zsd_deg(&self) -> f64 {
        10f64.powf(self.lg_zsd).min(52.0)
    }
}

/// Draw LSPs for a table row with the given cross-correlation.
pub fn draw_lsps_with<R: Rng + ?Sized>(
    params: &ScenarioParams,
    fc_ghz: f64,
    corr: &LspCorrelation,
    rng: &mut R,
) -> Result<LargeScaleParams> {
    let stats = params.statistics(fc_ghz)?;
    let z = SVector::<f64, LSP_COUNT>::from_fn(|_, _| rng.sample(StandardNormal));
    let x = corr.correlate(z);
    let lg = |p: Lsp| stats.mu[p as usize] + stats.sigma[p as usize] * x[p as usize];
    let k_db = match params.state {
        LinkState::Los => {
            let mu = params.k_mu_db.unwrap_or(0.0);
            Some(mu + params.k_sigma_db.unwrap_or(0.0) * x[6])
        }
        _ => None,
    };
    Ok(LargeScaleParams {
        lg_ds: lg(Lsp::Ds),
        lg_asd: lg(Lsp::Asd),
        lg_asa: lg(Lsp::Asa),
        lg_zsa: lg(Lsp::Zsa),
        lg_zsd: lg(Lsp::Zsd),
        sf_db: params.shadow_sigma_db * x[5],
        k_db,
        mu_lg_zsd: stats.mu[Lsp::Zsd as usize],
    })
}

/// Draw uncorrelated LSPs for (`scenario`, `state`) at `fc_ghz`.
pub fn draw_lsps<R: Rng + ?Sized>(
    table: &ScenarioParameterTable,
    scenario: ScenarioKind,
    state: LinkState,
    fc_ghz: f64,
    rng: &mut R,
) -> Result<LargeScaleParams> {
    draw_lsps_with(table.get(scenario, state)?, fc_ghz, &LspCorrelation::identity(), rng)
}
