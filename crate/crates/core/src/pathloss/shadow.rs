use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{stream, SimRng};
use crate::scenario::Position3D;

/// Lognormal shadowing along a sequence of positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowConfig {
    pub sigma_db: f64,
    /// `None` draws each position independently.
    pub decorrelation_distance: Option<f64>,
    pub seed: u64,
}

impl ShadowConfig {
    pub fn iid(sigma_db: f64, seed: u64) -> Self {
        Self {
            sigma_db,
            decorrelation_distance: None,
            seed,
        }
    }
}

/// Shadow fading values (dB) at each position in order.
///
/// With a decorrelation distance the sequence is a first-order
/// autoregression whose correlation between consecutive points decays as
/// `exp(-delta / d_corr)` in the distance travelled.
pub fn shadow_draw(cfg: &ShadowConfig, positions: &[Position3D]) -> Result<Vec<f64>> {
    let mut rng = stream(cfg.seed, 0x5f);
    shadow_draw_with(cfg, positions, &mut rng)
}

pub fn shadow_draw_with(cfg: &ShadowConfig, positions: &[Position3D], rng: &mut SimRng) -> Result<Vec<f64>> {
    if !(cfg.sigma_db >= 0.0) {
        return Err(Error::invalid(format!(
            "shadow sigma must be >= 0, got {}",
            cfg.sigma_db
        )));
    }
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let sigma = cfg.sigma_db;
    match cfg.decorrelation_distance {
        None => Ok(positions.iter().map(|_| sigma * gauss()).collect()),
        Some(d_corr) => {
            if !(d_corr > 0.0) {
                return Err(Error::invalid(format!(
                    "decorrelation distance must be > 0, got {d_corr}"
                )));
            }
            let mut out = Vec::with_capacity(positions.len());
            let mut prev: Option<(Position3D, f64)> = None;
            for p in positions {
                let s = match prev {
                    None => sigma * gauss(),
                    Some((q, s_prev)) => {
                        let rho = (-p.distance(&q) / d_corr).exp();
                        rho * s_prev + sigma * (1.0 - rho * rho).sqrt() * gauss()
                    }
                };
                out.push(s);
                prev = Some((*p, s));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, step: f64) -> Vec<Position3D> {
        (0..n).map(|i| Position3D::new(i as f64 * step, 0.0, 1.5)).collect()
    }

    fn mean_std(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, var.sqrt())
    }

    #[test]
    fn iid_moments() {
        let cfg = ShadowConfig::iid(8.0, 11);
        let s = shadow_draw(&cfg, &line(100_000, 1.0)).unwrap();
        let (m, sd) = mean_std(&s);
        assert!(m.abs() < 0.1, "{m}");
        assert!((sd - 8.0).abs() / 8.0 < 0.02, "{sd}");
    }

    #[test]
    fn correlated_autocorrelation_at_decorrelation_lag() {
        let cfg = ShadowConfig {
            sigma_db: 4.0,
            decorrelation_distance: Some(10.0),
            seed: 3,
        };
        let s = shadow_draw(&cfg, &line(100_000, 1.0)).unwrap();
        let (m, sd) = mean_std(&s);
        assert!((sd - 4.0).abs() / 4.0 < 0.05, "{sd}");
        let lag = 10;
        let n = s.len() - lag;
        let c: f64 = (0..n).map(|i| (s[i] - m) * (s[i + lag] - m)).sum::<f64>() / n as f64;
        let r = c / (sd * sd);
        assert!((r - (-1f64).exp()).abs() < 0.05, "{r}");
    }

    #[test]
    fn seeded_and_validated() {
        let cfg = ShadowConfig::iid(4.0, 9);
        let p = line(10, 1.0);
        assert_eq!(shadow_draw(&cfg, &p).unwrap(), shadow_draw(&cfg, &p).unwrap());
        assert!(shadow_draw(&ShadowConfig::iid(-1.0, 0), &p).is_err());
        let bad = ShadowConfig {
            decorrelation_distance: Some(0.0),
            ..cfg
        };
        assert!(shadow_draw(&bad, &p).is_err());
    }
}
