use rand::Rng;
use rand_distr::StandardNormal;

use super::oxygen::load_atmos;
use crate::data;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialComponent {
    pub proportion: f64,
    pub a_db: f64,
    pub b_db_per_ghz: f64,
}

impl MaterialComponent {
    /// Material loss `a + b f` at `f_ghz`.
    pub fn loss_db(&self, f_ghz: f64) -> f64 {
        self.a_db + self.b_db_per_ghz * f_ghz
    }
}

/// Composite building wall.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialMix {
    components: Vec<MaterialComponent>,
    pub pl_npi_db: f64,
    pub sigma_p_db: f64,
    /// Indoor loss slope, dB/m.
    pub indoor_db_per_m: f64,
}

impl MaterialMix {
    pub fn new(
        components: Vec<MaterialComponent>,
        pl_npi_db: f64,
        sigma_p_db: f64,
        indoor_db_per_m: f64,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("material mix needs at least one component"));
        }
        if components.iter().any(|c| !(c.proportion >= 0.0)) {
            return Err(Error::invalid("material proportions must be >= 0"));
        }
        let total: f64 = components.iter().map(|c| c.proportion).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "material proportions sum to {total}, expected 1"
            )));
        }
        if !(sigma_p_db >= 0.0) || !(indoor_db_per_m >= 0.0) {
            return Err(Error::invalid("sigma_p and indoor loss slope must be >= 0"));
        }
        Ok(Self {
            components,
            pl_npi_db,
            sigma_p_db,
            indoor_db_per_m,
        })
    }

    /// Named preset from the data file ("low-loss", "high-loss").
    pub fn preset(name: &str) -> Result<Self> {
        let file = load_atmos()?;
        let entry = file
            .preset
            .get(name)
            .ok_or_else(|| Error::invalid(format!("unknown material preset '{name}'")))?;
        let mut comps = Vec::with_capacity(entry.components.len());
        for (p, mat) in &entry.components {
            let m = file.material.get(mat).ok_or_else(|| {
                data::data_error(
                    data::ATMOS_MATERIALS,
                    format!("preset {name} uses unknown material {mat}"),
                )
            })?;
            comps.push(MaterialComponent {
                proportion: *p,
                a_db: m.a_db,
                b_db_per_ghz: m.b_db_per_ghz,
            });
        }
        Self::new(comps, entry.pl_npi_db, entry.sigma_p_db, entry.indoor_db_per_m)
    }

    pub fn components(&self) -> &[MaterialComponent] {
        &self.components
    }

    /// Deterministic through-wall loss at `f_ghz`, dB.
    pub fn through_wall_db(&self, f_ghz: f64) -> f64 {
        let lin: f64 = self
            .components
            .iter()
            .map(|c| c.proportion * 10f64.powf(-c.loss_db(f_ghz) / 10.0))
            .sum();
        self.pl_npi_db - 10.0 * lin.log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct O2iLoss {
    pub pl_tw: f64,
    pub pl_in: f64,
    pub excess: f64,
}

impl O2iLoss {
    pub fn total(&self) -> f64 {
        self.pl_tw + self.pl_in + self.excess
    }
}

/// Outdoor-to-indoor penetration for an indoor distance `d_in` (m).
pub fn o2i_loss<R: Rng + ?Sized>(mix: &MaterialMix, f_ghz: f64, d_in: f64, rng: &mut R) -> Result<O2iLoss> {
    if !(d_in >= 0.0) {
        return Err(Error::invalid(format!("indoor distance must be >= 0, got {d_in}")));
    }
    let z: f64 = rng.sample(StandardNormal);
    Ok(O2iLoss {
        pl_tw: mix.through_wall_db(f_ghz),
        pl_in: mix.indoor_db_per_m * d_in,
        excess: mix.sigma_p_db * z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn std_of_excess(mix: &MaterialMix) -> f64 {
        let mut rng = stream(5, 1);
        let v: Vec<f64> = (0..10_000)
            .map(|_| o2i_loss(mix, 28.0, 10.0, &mut rng).unwrap().excess)
            .collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    }

    #[test]
    fn presets() {
        let low = MaterialMix::preset("low-loss").unwrap();
        let high = MaterialMix::preset("high-loss").unwrap();
        assert!((std_of_excess(&high) - 6.5).abs() < 0.3);
        assert!((std_of_excess(&low) - 4.4).abs() < 0.3);
        assert!(high.through_wall_db(28.0) > low.through_wall_db(28.0));
        let mut rng = stream(1, 1);
        let l = o2i_loss(&low, 28.0, 10.0, &mut rng).unwrap();
        assert_abs_diff_eq!(l.pl_in, 5.0, epsilon = 1e-12);
        assert!(MaterialMix::preset("nope").is_err());
    }

    #[test]
    fn single_material_identity() {
        let c = MaterialComponent {
            proportion: 1.0,
            a_db: 5.0,
            b_db_per_ghz: 4.0,
        };
        let mix = MaterialMix::new(vec![c], 5.0, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(mix.through_wall_db(10.0), 5.0 + 45.0, epsilon = 1e-9);
        assert!(MaterialMix::new(vec![MaterialComponent { proportion: 0.5, ..c }], 5.0, 0.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn through_wall_increasing_in_frequency(f in 0.5..99.0f64, df in 0.01..1.0f64, preset in 0usize..2) {
            let mix = MaterialMix::preset(["low-loss", "high-loss"][preset]).unwrap();
            prop_assert!(mix.through_wall_db(f + df) > mix.through_wall_db(f));
        }

        #[test]
        fn adding_lossless_material_never_increases(p in 0.01..0.99f64, f in 0.5..100.0f64) {
            let mix = MaterialMix::preset("high-loss").unwrap();
            let mut comps: Vec<MaterialComponent> = mix
                .components()
                .iter()
                .map(|c| MaterialComponent { proportion: c.proportion * (1.0 - p), ..*c })
                .collect();
            comps.push(MaterialComponent { proportion: p, a_db: 0.0, b_db_per_ghz: 0.0 });
            let mixed = MaterialMix::new(comps, mix.pl_npi_db, mix.sigma_p_db, mix.indoor_db_per_m).unwrap();
            prop_assert!(mixed.through_wall_db(f) <= mix.through_wall_db(f) + 1e-12);
        }
    }
}
