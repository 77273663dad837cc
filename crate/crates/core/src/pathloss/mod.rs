//! Closed-form pathloss models from the 2G to 5G generations, plus
//! lognormal shadow fading.
//!
//! `log` below always means log10. Every model rejects inputs outside its
//! published validity range instead of extrapolating.

mod shadow;

pub use shadow::{shadow_draw, shadow_draw_with, ShadowConfig};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::scenario::{breakpoint_distance, LinkGeometry, LinkState, DEFAULT_ENV_HEIGHT, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelId {
    FreeSpace,
    OkumuraHata,
    Indoor3g,
    OutdoorToIndoor3g,
    Vehicular3g,
    Umi4gLos,
    Umi4gNlos,
    Uma4gLos,
    Uma4gNlos,
    Uma5gLos,
    Uma5gNlos,
}

/// Mean pathloss plus a shadowing realisation, all in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossResult {
    pub mean_pl: f64,
    pub shadow: f64,
    pub total: f64,
    pub model_id: ModelId,
}

impl PathlossResult {
    pub fn new(model_id: ModelId, mean_pl: f64, shadow: f64) -> Self {
        Self {
            mean_pl,
            shadow,
            total: mean_pl + shadow,
            model_id,
        }
    }
}

/// Received power from the free-space (Friis) equation, in watts.
///
/// Only meaningful in the far field; the caller is responsible for that.
pub fn friis_received_power(p_t: f64, g_t_dbi: f64, g_r_dbi: f64, f_hz: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("distance must be positive, got {d}")));
    }
    if !(f_hz > 0.0) {
        return Err(Error::invalid(format!("frequency must be positive, got {f_hz}")));
    }
    let lambda = SPEED_OF_LIGHT / f_hz;
    let g_t = db_to_lin(g_t_dbi);
    let g_r = db_to_lin(g_r_dbi);
    Ok(p_t * g_t * g_r * (lambda / (4.0 * std::f64::consts::PI * d)).powi(2))
}

/// Free-space loss `20 log(4 pi d / lambda)` in dB; the dB companion of
/// [`friis_received_power`].
pub fn free_space_pathloss_db(f_hz: f64, d: f64) -> Result<f64> {
    let pr = friis_received_power(1.0, 0.0, 0.0, f_hz, d)?;
    Ok(-10.0 * pr.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CitySize {
    #[default]
    Medium,
}

/// Okumura-Hata inputs. Frequency is in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HataParams {
    pub f_mhz: f64,
    pub h_t: f64,
    pub h_r: f64,
    pub city_size: CitySize,
}

impl HataParams {
    pub fn validate(&self) -> Result<()> {
        check_range("Okumura-Hata", "f (MHz)", self.f_mhz, 150.0, 1500.0)?;
        check_range("Okumura-Hata", "h_t (m)", self.h_t, 30.0, 200.0)?;
        check_range("Okumura-Hata", "h_r (m)", self.h_r, 1.0, 10.0)?;
        Ok(())
    }

    /// Mobile antenna correction a(h_r) for a medium-sized city, as printed:
    /// `(1.1 log f - 0.7) h_r - 1.56 log f - 0.8`.
    pub fn mobile_correction(&self) -> f64 {
        let lf = self.f_mhz.log10();
        match self.city_size {
            CitySize::Medium => (1.1 * lf - 0.7) * self.h_r - 1.56 * lf - 0.8,
        }
    }

    /// Effective pathloss exponent `(44.9 - 6.55 log h_t) / 10`.
    pub fn pathloss_exponent(&self) -> f64 {
        (44.9 - 6.55 * self.h_t.log10()) / 10.0
    }
}

/// Urban Okumura-Hata pathloss (dB) at 2D distance `d_km`.
pub fn pl_okumura_hata(p: &HataParams, d_km: f64) -> Result<f64> {
    p.validate()?;
    check_range("Okumura-Hata", "d (km)", d_km, 1.0, 20.0)?;
    let lf = p.f_mhz.log10();
    let lht = p.h_t.log10();
    Ok(69.55 + 26.16 * lf - 13.82 * lht - p.mobile_correction() + (44.9 - 6.55 * lht) * d_km.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DistanceUnit {
    #[default]
    Meters,
    Kilometers,
}

/// The three 3G test environments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pl3gKind {
    /// Indoor office; `unit` selects how `d` is read (metres by default).
    Indoor { n_floors: u32, unit: DistanceUnit },
    /// Outdoor to indoor, worst case; `d` in km, `f` in MHz.
    OutdoorToIndoor,
    /// Vehicular; `delta_h_t` is the BS height above average rooftop (m).
    Vehicular { delta_h_t: f64 },
}

/// 3G pathloss in dB. `d` is in metres for the indoor model (unless its
/// unit flag says km) and in km otherwise; `f_mhz` is ignored indoors.
pub fn pl_3g(kind: Pl3gKind, d: f64, f_mhz: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("3G pathloss needs d > 0, got {d}")));
    }
    match kind {
        Pl3gKind::Indoor { n_floors, .. } => {
            let n = f64::from(n_floors);
            let floor = if n_floors == 0 {
                0.0
            } else {
                18.3 * n.powf((n + 2.0) / (n + 1.0) - 0.46)
            };
            Ok(37.0 + 30.0 * d.log10() + floor)
        }
        Pl3gKind::OutdoorToIndoor => {
            check_positive("3G outdoor-to-indoor", "f (MHz)", f_mhz)?;
            Ok(40.0 * d.log10() + 30.0 * f_mhz.log10() + 49.0)
        }
        Pl3gKind::Vehicular { delta_h_t } => {
            check_positive("3G vehicular", "f (MHz)", f_mhz)?;
            if !(delta_h_t > 0.0) {
                return Err(Error::OutOfRange {
                    model: "3G vehicular",
                    quantity: "delta_h_t (m)",
                    value: delta_h_t,
                    min: f64::MIN_POSITIVE,
                    max: 50.0,
                });
            }
            check_range("3G vehicular", "delta_h_t (m)", delta_h_t, 0.0, 50.0)?;
            Ok(40.0 * (1.0 - 4e-3 * delta_h_t) * d.log10() - 18.0 * delta_h_t.log10() + 21.0 * f_mhz.log10() + 80.0)
        }
    }
}

fn check_positive(model: &'static str, quantity: &'static str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            model,
            quantity,
            value: v,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario4g {
    Umi,
    Uma,
}

/// Extra inputs of the 4G UMa NLOS model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmaNlos4gParams {
    /// Street width, m.
    pub street_width: f64,
    /// Average building height, m.
    pub building_height: f64,
}

impl Default for UmaNlos4gParams {
    fn default() -> Self {
        Self {
            street_width: 20.0,
            building_height: 20.0,
        }
    }
}

const UMA_4G_NLOS: &str = "4G UMa NLOS";

fn validate_uma_nlos(p: &UmaNlos4gParams, h_t: f64, h_r: f64) -> Result<()> {
    check_range(UMA_4G_NLOS, "h (m)", p.building_height, 5.0, 50.0)?;
    check_range(UMA_4G_NLOS, "W (m)", p.street_width, 5.0, 50.0)?;
    check_range(UMA_4G_NLOS, "h_t (m)", h_t, 10.0, 150.0)?;
    check_range(UMA_4G_NLOS, "h_r (m)", h_r, 1.5, 22.5)?;
    Ok(())
}

/// 3D UMi/UMa LOS pathloss shared by 4G and the 5G UMa LOS model.
///
/// The breakpoint switch compares the ground distance with `d_break` while
/// the formulas use the 3D distance, which makes the two branches meet.
fn los_dual_slope(geom: &LinkGeometry, f_ghz: f64, h_env: f64) -> Result<f64> {
    let d_bp = breakpoint_distance(geom.h_t, geom.h_r, f_ghz * 1e9, h_env)?;
    let d = geom.d3d;
    let pl = if geom.d2d <= d_bp {
        22.0 * d.log10() + 28.0 + 20.0 * f_ghz.log10()
    } else {
        let dh = geom.h_t - geom.h_r;
        40.0 * d.log10() + 28.0 + 20.0 * f_ghz.log10() - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };
    Ok(pl)
}

/// 4G 3D UMi / UMa pathloss in dB. `f_ghz` in GHz.
pub fn pl_4g(
    scenario: Scenario4g,
    state: LinkState,
    geom: &LinkGeometry,
    f_ghz: f64,
    uma_nlos: Option<&UmaNlos4gParams>,
) -> Result<f64> {
    pl_4g_with_env(scenario, state, geom, f_ghz, uma_nlos, DEFAULT_ENV_HEIGHT)
}

pub fn pl_4g_with_env(
    scenario: Scenario4g,
    state: LinkState,
    geom: &LinkGeometry,
    f_ghz: f64,
    uma_nlos: Option<&UmaNlos4gParams>,
    h_env: f64,
) -> Result<f64> {
    const MODEL: &str = "4G 3D pathloss";
    check_range(MODEL, "f (GHz)", f_ghz, 0.45, 6.0)?;
    let d = geom.d3d;
    match (scenario, state) {
        (Scenario4g::Umi, LinkState::Los) => {
            check_range("4G UMi LOS", "h_t (m)", geom.h_t, 0.0, 10.0)?;
            check_range("4G UMi LOS", "h_r (m)", geom.h_r, 1.5, 22.5)?;
            check_range("4G UMi LOS", "d3d (m)", d, 10.0, 5000.0)?;
            los_dual_slope(geom, f_ghz, h_env)
        }
        (Scenario4g::Uma, LinkState::Los) => {
            check_range("4G UMa LOS", "h_r (m)", geom.h_r, 1.5, 22.5)?;
            check_range("4G UMa LOS", "d3d (m)", d, 10.0, 5000.0)?;
            los_dual_slope(geom, f_ghz, h_env)
        }
        (Scenario4g::Umi, LinkState::Nlos) => {
            check_range("4G UMi NLOS", "h_r (m)", geom.h_r, 1.5, 22.5)?;
            check_range("4G UMi NLOS", "d3d (m)", d, 10.0, 2000.0)?;
            Ok(36.7 * d.log10() + 22.7 + 26.0 * f_ghz.log10() - 0.3 * (geom.h_r - 1.5))
        }
        (Scenario4g::Uma, LinkState::Nlos) => {
            let p = uma_nlos.copied().unwrap_or_default();
            validate_uma_nlos(&p, geom.h_t, geom.h_r)?;
            check_range(UMA_4G_NLOS, "d3d (m)", d, 10.0, 5000.0)?;
            let w = p.street_width;
            let h = p.building_height;
            let ht = geom.h_t;
            let c = 3.2 * 17.625f64.log10().powi(2) - 4.97;
            Ok(
                161.04 - 7.1 * w.log10() + 7.5 * h.log10() - (24.37 - 3.7 * (h / ht).powi(2)) * ht.log10()
                    + (43.42 - 3.1 * ht.log10()) * (d.log10() - 3.0)
                    + 20.0 * f_ghz.log10()
                    - c
                    - 0.6 * (geom.h_r - 1.5),
            )
        }
        (_, LinkState::O2i) => Err(Error::invalid(
            "4G outdoor-to-indoor pathloss is not modelled; use the O2I penetration loss",
        )),
    }
}

/// 5G UMa (LOS, NLOS) pathloss pair in dB; NLOS = max(LOS, NLOS').
pub fn pl_5g_uma(geom: &LinkGeometry, f_ghz: f64) -> Result<(f64, f64)> {
    pl_5g_uma_with_env(geom, f_ghz, DEFAULT_ENV_HEIGHT)
}

pub fn pl_5g_uma_with_env(geom: &LinkGeometry, f_ghz: f64, h_env: f64) -> Result<(f64, f64)> {
    const MODEL: &str = "5G UMa";
    check_range(MODEL, "f (GHz)", f_ghz, 0.5, 100.0)?;
    check_range(MODEL, "d3d (m)", geom.d3d, 10.0, 5000.0)?;
    check_range(MODEL, "h_r (m)", geom.h_r, 1.5, 22.5)?;
    let los = los_dual_slope(geom, f_ghz, h_env)?;
    let nlos_prime = 13.54 + 39.081 * geom.d3d.log10() + 20.0 * f_ghz.log10() - 0.6 * (geom.h_r - 1.5);
    Ok((los, los.max(nlos_prime)))
}

pub(crate) fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Position3D, Velocity};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn geom(ht: f64, hr: f64, d2d: f64) -> LinkGeometry {
        LinkGeometry::new(
            Position3D::new(0.0, 0.0, ht),
            Position3D::new(d2d, 0.0, hr),
            Velocity::ZERO,
        )
    }

    #[test]
    fn friis_examples() {
        let fspl = free_space_pathloss_db(2e9, 100.0).unwrap();
        let lambda = SPEED_OF_LIGHT / 2e9;
        let oracle = 20.0 * (4.0 * std::f64::consts::PI * 100.0 / lambda).log10();
        assert_abs_diff_eq!(fspl, oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(fspl, 78.46, epsilon = 0.01);

        let p1 = friis_received_power(1.0, 0.0, 0.0, 2e9, 100.0).unwrap();
        let p2 = friis_received_power(1.0, 0.0, 0.0, 2e9, 200.0).unwrap();
        assert_abs_diff_eq!(p1 / p2, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(10.0 * (p1 / p2).log10(), 6.0206, epsilon = 1e-4);

        let hi = free_space_pathloss_db(100e9, 100.0).unwrap();
        assert_abs_diff_eq!(hi - fspl, 20.0 * 50f64.log10(), epsilon = 1e-9);
        assert_abs_diff_eq!(hi - fspl, 33.98, epsilon = 0.005);

        assert!(friis_received_power(1.0, 0.0, 0.0, 2e9, 0.0).is_err());
        assert!(friis_received_power(1.0, 0.0, 0.0, 2e9, -1.0).is_err());
    }

    #[test]
    fn hata_examples() {
        let p = HataParams {
            f_mhz: 900.0,
            h_t: 50.0,
            h_r: 1.5,
            city_size: CitySize::Medium,
        };
        assert_abs_diff_eq!(p.mobile_correction(), -1.584, epsilon = 5e-4);
        let pl = pl_okumura_hata(&p, 1.0).unwrap();
        // term-by-term at d = 1 km (distance term vanishes)
        let oracle = 69.55 + 26.16 * 900f64.log10() - 13.82 * 50f64.log10() + 1.584_118;
        assert_abs_diff_eq!(pl, oracle, epsilon = 1e-5);
        assert_abs_diff_eq!(pl, 124.92, epsilon = 0.02);

        let pl10 = pl_okumura_hata(&p, 10.0).unwrap();
        assert_abs_diff_eq!(pl10 - pl, 44.9 - 6.55 * 50f64.log10(), epsilon = 1e-9);

        let exps: Vec<f64> = [30.0, 50.0, 100.0, 200.0]
            .iter()
            .map(|&h| HataParams { h_t: h, ..p }.pathloss_exponent())
            .collect();
        assert!(exps.windows(2).all(|w| w[1] < w[0]));

        assert!(pl_okumura_hata(&HataParams { f_mhz: 1800.0, ..p }, 1.0).is_err());
        assert!(pl_okumura_hata(&p, 0.5).is_err());
        assert!(pl_okumura_hata(&HataParams { h_t: 20.0, ..p }, 1.0).is_err());
    }

    #[test]
    fn pl_3g_examples() {
        let o2i = pl_3g(Pl3gKind::OutdoorToIndoor, 1.0, 2000.0).unwrap();
        assert_abs_diff_eq!(o2i, 30.0 * 2000f64.log10() + 49.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o2i, 148.03, epsilon = 0.005);

        let veh = pl_3g(Pl3gKind::Vehicular { delta_h_t: 15.0 }, 1.0, 2000.0).unwrap();
        let oracle = -18.0 * 15f64.log10() + 21.0 * 2000f64.log10() + 80.0;
        assert_abs_diff_eq!(veh, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(veh, 128.152, epsilon = 5e-4);

        let indoor = |n, d| {
            pl_3g(
                Pl3gKind::Indoor {
                    n_floors: n,
                    unit: DistanceUnit::Meters,
                },
                d,
                0.0,
            )
            .unwrap()
        };
        assert_abs_diff_eq!(indoor(0, 10.0), 37.0 + 30.0, epsilon = 1e-12);
        // n = 1: exponent (3/2) - 0.46 = 1.04
        assert_abs_diff_eq!(indoor(1, 10.0), 67.0 + 18.3, epsilon = 1e-12);
        let n2 = indoor(2, 10.0) - 67.0;
        assert_abs_diff_eq!(n2, 18.3 * 2f64.powf(4.0 / 3.0 - 0.46), epsilon = 1e-12);

        assert!(pl_3g(Pl3gKind::Vehicular { delta_h_t: 0.0 }, 1.0, 2000.0).is_err());
        assert!(pl_3g(Pl3gKind::Vehicular { delta_h_t: 60.0 }, 1.0, 2000.0).is_err());
        assert!(pl_3g(Pl3gKind::OutdoorToIndoor, 0.0, 2000.0).is_err());
    }

    #[test]
    fn pl_4g_examples() {
        let g = geom(10.0, 1.5, 0.0);
        let g = LinkGeometry {
            d3d: 100.0,
            d2d: (100.0f64.powi(2) - 8.5f64.powi(2)).sqrt(),
            ..g
        };
        let pl = pl_4g(Scenario4g::Umi, LinkState::Los, &g, 2.0, None).unwrap();
        assert_abs_diff_eq!(pl, 44.0 + 28.0 + 20.0 * 2f64.log10(), epsilon = 1e-12);
        assert_abs_diff_eq!(pl, 78.02, epsilon = 0.005);

        // UMa LOS is the UMi LOS formula
        let g2 = geom(10.0, 1.5, 300.0);
        for f in [0.9, 2.0, 3.5, 5.9] {
            let a = pl_4g(Scenario4g::Umi, LinkState::Los, &g2, f, None).unwrap();
            let b = pl_4g(Scenario4g::Uma, LinkState::Los, &g2, f, None).unwrap();
            assert_eq!(a, b);
        }

        assert!(pl_4g(Scenario4g::Umi, LinkState::Nlos, &geom(10.0, 1.5, 3000.0), 2.0, None).is_err());
        assert!(pl_4g(Scenario4g::Umi, LinkState::Los, &geom(10.0, 1.5, 5.0), 2.0, None).is_err());
    }

    /// Independent term-by-term evaluation of the 4G UMa NLOS expression.
    #[test]
    fn pl_4g_uma_nlos_matches_scripted_evaluation() {
        let (w, h, ht, hr, d, f) = (20.0f64, 20.0f64, 25.0f64, 1.5f64, 500.0f64, 2.0f64);
        let terms = [
            161.04,
            -7.1 * w.log10(),
            7.5 * h.log10(),
            -(24.37 - 3.7 * (h / ht) * (h / ht)) * ht.log10(),
            (43.42 - 3.1 * ht.log10()) * (d.log10() - 3.0),
            20.0 * f.log10(),
            -(3.2 * 17.625f64.log10() * 17.625f64.log10() - 4.97),
            -0.6 * (hr - 1.5),
        ];
        let oracle: f64 = terms.iter().sum();
        // d3d = 500 exactly
        let d2d = (d * d - (ht - hr) * (ht - hr)).sqrt();
        let g = geom(ht, hr, d2d);
        let p = UmaNlos4gParams {
            street_width: w,
            building_height: h,
        };
        let pl = pl_4g(Scenario4g::Uma, LinkState::Nlos, &g, f, Some(&p)).unwrap();
        assert_abs_diff_eq!(pl, oracle, epsilon = 1e-9);

        let bad = UmaNlos4gParams {
            street_width: 60.0,
            ..p
        };
        assert!(pl_4g(Scenario4g::Uma, LinkState::Nlos, &g, f, Some(&bad)).is_err());
    }

    #[test]
    fn pl_5g_examples() {
        let d2d = (100.0f64 * 100.0 - 23.5 * 23.5).sqrt();
        let g = geom(25.0, 1.5, d2d);
        let (los, nlos) = pl_5g_uma(&g, 28.0).unwrap();
        assert_abs_diff_eq!(los, 28.0 + 44.0 + 20.0 * 28f64.log10(), epsilon = 1e-9);
        assert_abs_diff_eq!(los, 100.94, epsilon = 0.005);
        assert_abs_diff_eq!(nlos, 13.54 + 78.162 + 20.0 * 28f64.log10(), epsilon = 1e-9);
        assert_abs_diff_eq!(nlos, 120.64, epsilon = 0.01);

        // slopes: 22 dB/decade before the breakpoint, 40 after (h terms fixed)
        let near = |d: f64| pl_5g_uma(&geom(25.0, 1.5, d), 28.0).unwrap().0;
        let pre = near(200.0) - near(20.0);
        let g200 = geom(25.0, 1.5, 200.0);
        let g20 = geom(25.0, 1.5, 20.0);
        assert_abs_diff_eq!(pre, 22.0 * (g200.d3d / g20.d3d).log10(), epsilon = 1e-9);
        let far = |d: f64| pl_5g_uma(&geom(25.0, 1.5, d), 2.0).unwrap().0;
        let gp = |d| geom(25.0, 1.5, d);
        let post = far(4000.0) - far(400.0);
        assert_abs_diff_eq!(post, 40.0 * (gp(4000.0).d3d / gp(400.0).d3d).log10(), epsilon = 1e-9);

        assert!(pl_5g_uma(&geom(25.0, 1.5, 6000.0), 28.0).is_err());
    }

    #[test]
    fn nlos_clamps_to_los_when_prime_is_lower() {
        // At very short range with high h_r the NLOS' formula can undercut LOS.
        let g = geom(25.0, 22.0, 10.0);
        let (los, nlos) = pl_5g_uma(&g, 2.0).unwrap();
        let prime = 13.54 + 39.081 * g.d3d.log10() + 20.0 * 2f64.log10() - 0.6 * (22.0 - 1.5);
        assert!(prime < los);
        assert_eq!(nlos, los);
    }

    #[test]
    fn frequency_slopes_by_finite_difference() {
        let h = 1e-4;
        let slope = |pl: &dyn Fn(f64) -> f64, f: f64| {
            let lf = f.log10();
            (pl(10f64.powf(lf + h)) - pl(10f64.powf(lf - h))) / (2.0 * h)
        };
        let g = geom(10.0, 1.5, 50.0);
        let g_far = geom(10.0, 1.5, 1500.0);
        let umi_los = |f| pl_4g(Scenario4g::Umi, LinkState::Los, &g, f, None).unwrap();
        let umi_los_far = |f| pl_4g(Scenario4g::Umi, LinkState::Los, &g_far, f, None).unwrap();
        let umi_nlos = |f| pl_4g(Scenario4g::Umi, LinkState::Nlos, &g, f, None).unwrap();
        let g5 = geom(25.0, 1.5, 300.0);
        let g5_far = geom(25.0, 1.5, 4000.0);
        let pl1 = |f| pl_5g_uma(&g5, f).unwrap().0;
        let pl2 = |f| pl_5g_uma(&g5_far, f).unwrap().0;
        let nlos5 = |f| {
            let (l, n) = pl_5g_uma(&g5_far, f).unwrap();
            assert!(n > l);
            n
        };
        assert_abs_diff_eq!(slope(&umi_los, 3.0), 20.0, epsilon = 1e-5);
        assert_abs_diff_eq!(slope(&pl1, 28.0), 20.0, epsilon = 1e-5);
        assert_abs_diff_eq!(slope(&nlos5, 28.0), 20.0, epsilon = 1e-5);
        assert_abs_diff_eq!(slope(&umi_nlos, 3.0), 26.0, epsilon = 1e-5);
        // Post-breakpoint the d_break term also depends on f:
        // d/dlog f of -9 log(d_bp^2 + dh^2) = -18 d_bp^2 / (d_bp^2 + dh^2)
        let post_slope = |ht: f64, f: f64| {
            let dbp = 4.0 * (ht - 1.0) * 0.5 * f * 1e9 / SPEED_OF_LIGHT;
            let dh = ht - 1.5;
            20.0 - 18.0 * dbp * dbp / (dbp * dbp + dh * dh)
        };
        assert_abs_diff_eq!(slope(&umi_los_far, 1.0), post_slope(10.0, 1.0), epsilon = 1e-5);
        assert_abs_diff_eq!(slope(&pl2, 2.0), post_slope(25.0, 2.0), epsilon = 1e-5);
    }

    fn is_nondecreasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1] >= w[0] - 1e-9)
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn hata_monotone_in_distance(f in 150.0..1500.0f64, ht in 30.0..200.0f64, hr in 1.0..10.0f64) {
            let p = HataParams { f_mhz: f, h_t: ht, h_r: hr, city_size: CitySize::Medium };
            let v: Vec<f64> = grid(1.0, 20.0, 40).iter().map(|&d| pl_okumura_hata(&p, d).unwrap()).collect();
            prop_assert!(is_nondecreasing(&v));
        }

        #[test]
        fn pl_3g_monotone_in_distance(f in 800.0..3000.0f64, dh in 0.5..50.0f64, n in 0u32..6) {
            let o2i: Vec<f64> = grid(0.01, 10.0, 40).iter().map(|&d| pl_3g(Pl3gKind::OutdoorToIndoor, d, f).unwrap()).collect();
            let veh: Vec<f64> = grid(0.01, 10.0, 40).iter().map(|&d| pl_3g(Pl3gKind::Vehicular { delta_h_t: dh }, d, f).unwrap()).collect();
            let ind: Vec<f64> = grid(1.0, 100.0, 40).iter().map(|&d| pl_3g(Pl3gKind::Indoor { n_floors: n, unit: DistanceUnit::Meters }, d, f).unwrap()).collect();
            prop_assert!(is_nondecreasing(&o2i) && is_nondecreasing(&veh) && is_nondecreasing(&ind));
        }

        #[test]
        fn pl_4g_monotone_in_distance(f in 0.45..6.0f64, ht_umi in 2.0..10.0f64, ht_uma in 10.5..149.0f64,
                                      hr in 1.6..22.0f64, w in 5.5..49.0f64, h in 5.5..49.0f64) {
            let p = UmaNlos4gParams { street_width: w, building_height: h };
            let mut curves: Vec<Vec<f64>> = vec![vec![]; 4];
            for d in grid(30.0, 1900.0, 60) {
                let gi = geom(ht_umi, hr, d);
                let ga = geom(ht_uma, hr, d);
                if ht_umi > 1.0 && hr > 1.0 && gi.d3d >= 10.0 {
                    if let Ok(v) = pl_4g(Scenario4g::Umi, LinkState::Los, &gi, f, None) { curves[0].push(v) }
                    if let Ok(v) = pl_4g(Scenario4g::Umi, LinkState::Nlos, &gi, f, None) { curves[1].push(v) }
                }
                if let Ok(v) = pl_4g(Scenario4g::Uma, LinkState::Los, &ga, f, None) { curves[2].push(v) }
                if let Ok(v) = pl_4g(Scenario4g::Uma, LinkState::Nlos, &ga, f, Some(&p)) { curves[3].push(v) }
            }
            for c in &curves {
                prop_assert!(is_nondecreasing(c));
            }
        }

        #[test]
        fn pl_5g_monotone_and_nlos_above_los(f in 0.5..100.0f64, ht in 10.0..35.0f64, hr in 1.5..22.5f64) {
            let mut los = vec![];
            let mut nlos = vec![];
            for d in grid(30.0, 4900.0, 80) {
                let g = geom(ht, hr, d);
                if g.d3d < 10.0 || g.d3d > 5000.0 { continue; }
                let (l, n) = pl_5g_uma(&g, f).unwrap();
                prop_assert!(n >= l);
                los.push(l);
                nlos.push(n);
            }
            prop_assert!(is_nondecreasing(&los));
            prop_assert!(is_nondecreasing(&nlos));
        }
    }
}
