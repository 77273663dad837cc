//! Geometry primitives, carrier handling and scenario enumeration.
//!
//! Angle convention: zenith is measured from +z (0 = straight up, π/2 =
//! horizon) and azimuth counter-clockwise from +x. Internally everything is
//! in radians; degrees only appear at I/O boundaries.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Default effective environment height for breakpoint computation, m.
pub const DEFAULT_ENV_HEIGHT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn distance(&self, other: &Position3D) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }
}

impl From<[f64; 3]> for Position3D {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// MS velocity as speed plus travel direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    /// m/s
    pub speed: f64,
    /// Travel azimuth, rad.
    pub azimuth: f64,
    /// Travel zenith, rad (π/2 = horizontal motion).
    pub zenith: f64,
}

impl Velocity {
    pub const ZERO: Velocity = Velocity {
        speed: 0.0,
        azimuth: 0.0,
        zenith: std::f64::consts::FRAC_PI_2,
    };

    pub fn horizontal(speed: f64, azimuth: f64) -> Self {
        Self {
            speed,
            azimuth,
            zenith: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        spherical_unit_vector(self.zenith, self.azimuth) * self.speed
    }
}

impl Default for Velocity {
    fn default() -> Self {
        Self::ZERO
    }
}

/// One BS-MS link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub bs_pos: Position3D,
    pub ms_pos: Position3D,
    pub ms_velocity: Velocity,
    pub d2d: f64,
    pub d3d: f64,
    pub h_t: f64,
    pub h_r: f64,
}

impl LinkGeometry {
    pub fn new(bs_pos: Position3D, ms_pos: Position3D, ms_velocity: Velocity) -> Self {
        let (d2d, d3d) = compute_link_distances(bs_pos, ms_pos);
        Self {
            bs_pos,
            ms_pos,
            ms_velocity,
            d2d,
            d3d,
            h_t: bs_pos.z,
            h_r: ms_pos.z,
        }
    }

    /// Unit vector from the BS towards the MS.
    pub fn los_direction(&self) -> Vector3<f64> {
        let d = self.ms_pos.to_vector() - self.bs_pos.to_vector();
        let n = d.norm();
        if n == 0.0 {
            Vector3::new(1.0, 0.0, 0.0)
        } else {
            d / n
        }
    }

    /// (zenith, azimuth) of the BS->MS direction, rad.
    pub fn los_departure_angles(&self) -> (f64, f64) {
        direction_angles(&self.los_direction())
    }

    /// (zenith, azimuth) of the MS->BS direction, rad.
    pub fn los_arrival_angles(&self) -> (f64, f64) {
        direction_angles(&(-self.los_direction()))
    }
}

/// Ground-plane and full 3D distance between two positions.
pub fn compute_link_distances(bs: Position3D, ms: Position3D) -> (f64, f64) {
    let dx = bs.x - ms.x;
    let dy = bs.y - ms.y;
    let dz = bs.z - ms.z;
    let d2d = dx.hypot(dy);
    (d2d, d2d.hypot(dz))
}

/// Carrier frequency, bandwidth and wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierSpec {
    f_c: f64,
    bandwidth: f64,
    wavelength: f64,
}

impl CarrierSpec {
    pub const MIN_HZ: f64 = 4.5e8;
    pub const MAX_HZ: f64 = 1.0e11;

    pub fn new(f_c: f64, bandwidth: f64) -> Result<Self> {
        crate::error::check_range("carrier", "f_c (Hz)", f_c, Self::MIN_HZ, Self::MAX_HZ)?;
        if !(bandwidth >= 0.0) {
            return Err(Error::invalid(format!("bandwidth must be >= 0, got {bandwidth}")));
        }
        Ok(Self {
            f_c,
            bandwidth,
            wavelength: SPEED_OF_LIGHT / f_c,
        })
    }

    pub fn from_ghz(f_ghz: f64) -> Result<Self> {
        Self::new(f_ghz * 1e9, 0.0)
    }

    pub fn f_c(&self) -> f64 {
        self.f_c
    }

    pub fn f_ghz(&self) -> f64 {
        self.f_c * 1e-9
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "UMi-StreetCanyon", alias = "UMi")]
    UmiStreetCanyon,
    #[serde(rename = "UMa")]
    Uma,
    #[serde(rename = "RMa")]
    Rma,
    #[serde(rename = "InH")]
    Inh,
    #[serde(rename = "Indoor3G")]
    Indoor3g,
    #[serde(rename = "Vehicular3G")]
    Vehicular3g,
    #[serde(rename = "O2I-3G")]
    O2i3g,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::UmiStreetCanyon,
        ScenarioKind::Uma,
        ScenarioKind::Rma,
        ScenarioKind::Inh,
        ScenarioKind::Indoor3g,
        ScenarioKind::Vehicular3g,
        ScenarioKind::O2i3g,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::UmiStreetCanyon => "UMi-StreetCanyon",
            ScenarioKind::Uma => "UMa",
            ScenarioKind::Rma => "RMa",
            ScenarioKind::Inh => "InH",
            ScenarioKind::Indoor3g => "Indoor3G",
            ScenarioKind::Vehicular3g => "Vehicular3G",
            ScenarioKind::O2i3g => "O2I-3G",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = match s.to_ascii_lowercase().as_str() {
            "umi" | "umi-streetcanyon" | "umi-street-canyon" => ScenarioKind::UmiStreetCanyon,
            "uma" => ScenarioKind::Uma,
            "rma" => ScenarioKind::Rma,
            "inh" => ScenarioKind::Inh,
            "indoor3g" => ScenarioKind::Indoor3g,
            "vehicular3g" => ScenarioKind::Vehicular3g,
            "o2i-3g" | "o2i3g" => ScenarioKind::O2i3g,
            _ => return Err(Error::invalid(format!("unknown scenario '{s}'"))),
        };
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkState {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
    #[serde(rename = "O2I")]
    O2i,
}

impl LinkState {
    pub fn name(self) -> &'static str {
        match self {
            LinkState::Los => "LOS",
            LinkState::Nlos => "NLOS",
            LinkState::O2i => "O2I",
        }
    }
}

impl fmt::Display for LinkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LOS" => Ok(LinkState::Los),
            "NLOS" => Ok(LinkState::Nlos),
            "O2I" => Ok(LinkState::O2i),
            _ => Err(Error::invalid(format!("unknown link state '{s}'"))),
        }
    }
}

/// Breakpoint distance `4 (h_t - h_env)(h_r - h_env) f_c / c`, metres.
pub fn breakpoint_distance(h_t: f64, h_r: f64, f_c: f64, h_env: f64) -> Result<f64> {
    let ht_eff = h_t - h_env;
    let hr_eff = h_r - h_env;
    if !(ht_eff > 0.0 && hr_eff > 0.0) {
        return Err(Error::invalid(format!(
            "breakpoint needs positive effective heights, got h_t-h_env={ht_eff}, h_r-h_env={hr_eff}"
        )));
    }
    if !(f_c > 0.0) {
        return Err(Error::invalid(format!("carrier frequency must be positive, got {f_c}")));
    }
    Ok(4.0 * ht_eff * hr_eff * f_c / SPEED_OF_LIGHT)
}

/// Unit vector for zenith `theta` and azimuth `phi` (rad).
pub fn spherical_unit_vector(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Inverse of [`spherical_unit_vector`]: (zenith, azimuth) of a direction.
pub fn direction_angles(v: &Vector3<f64>) -> (f64, f64) {
    let n = v.norm();
    let theta = (v.z / n).clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    (theta, phi)
}

/// Wrap an angle to (-π, π].
pub fn wrap_pi(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn link_distances_examples() {
        let (d2, d3) = compute_link_distances(Position3D::new(0.0, 0.0, 10.0), Position3D::new(0.0, 0.0, 1.5));
        assert_eq!(d2, 0.0);
        assert_abs_diff_eq!(d3, 8.5, epsilon = 1e-12);

        let (d2, d3) = compute_link_distances(Position3D::new(0.0, 0.0, 25.0), Position3D::new(100.0, 0.0, 1.5));
        assert_abs_diff_eq!(d2, 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d3, (100.0f64 * 100.0 + 23.5 * 23.5).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d3, 102.724, epsilon = 5e-4);

        let (d2, d3) = compute_link_distances(Position3D::new(3.0, 4.0, 0.0), Position3D::default());
        assert_abs_diff_eq!(d2, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d3, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn breakpoint_examples() {
        let d = breakpoint_distance(10.0, 1.5, 2e9, 1.0).unwrap();
        // 4 * 9 * 0.5 * 2e9 / c
        assert_abs_diff_eq!(d, 3.6e10 / SPEED_OF_LIGHT, epsilon = 1e-9);
        assert!((d - 120.0).abs() < 0.1);

        let lo = breakpoint_distance(25.0, 1.5, 2e9, 1.0).unwrap();
        let hi = breakpoint_distance(25.0, 1.5, 100e9, 1.0).unwrap();
        assert!((hi / lo - 50.0).abs() < 1e-9 * 50.0);

        assert!(breakpoint_distance(1.0, 1.5, 2e9, 1.0).is_err());
        assert!(breakpoint_distance(10.0, 0.5, 2e9, 1.0).is_err());
    }

    #[test]
    fn unit_vector_examples() {
        let v = spherical_unit_vector(0.0, 1.234);
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.z, 1.0, epsilon = 1e-15);
        let v = spherical_unit_vector(FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(v.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.z, 0.0, epsilon = 1e-15);
        let v = spherical_unit_vector(FRAC_PI_2, FRAC_PI_4);
        assert_abs_diff_eq!(v.x, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_vector_norm_over_many_directions() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, 0);
        for _ in 0..10_000 {
            let th = rng.random_range(0.0..=PI);
            let ph = rng.random_range(-PI..PI);
            let n = spherical_unit_vector(th, ph).norm();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn carrier_wavelength() {
        let c = CarrierSpec::from_ghz(3.5).unwrap();
        assert_abs_diff_eq!(c.wavelength() * c.f_c(), SPEED_OF_LIGHT, epsilon = 1e-3);
        assert!(CarrierSpec::from_ghz(0.2).is_err());
        assert!(CarrierSpec::from_ghz(120.0).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("UMi".parse::<ScenarioKind>().unwrap(), ScenarioKind::UmiStreetCanyon);
        assert_eq!("nlos".parse::<LinkState>().unwrap(), LinkState::Nlos);
        assert!("suburb".parse::<ScenarioKind>().is_err());
    }

    proptest! {
        #[test]
        fn d3d_identity(bx in -1e3..1e3f64, by in -1e3..1e3f64, bz in 0.0..200.0f64,
                        mx in -1e3..1e3f64, my in -1e3..1e3f64, mz in 0.0..30.0f64) {
            let (d2, d3) = compute_link_distances(Position3D::new(bx, by, bz), Position3D::new(mx, my, mz));
            let dh = bz - mz;
            prop_assert!(d3 >= d2 && d2 >= 0.0);
            prop_assert!((d3 * d3 - (d2 * d2 + dh * dh)).abs() <= 1e-9 * (1.0 + d3 * d3));
        }

        #[test]
        fn breakpoint_linear_in_frequency(ht in 2.0..100.0f64, hr in 1.1..20.0f64, f in 1e9..5e10f64, k in 0.1..10.0f64) {
            let a = breakpoint_distance(ht, hr, f, 1.0).unwrap();
            let b = breakpoint_distance(ht, hr, k * f, 1.0).unwrap();
            prop_assert!((b - k * a).abs() <= 1e-9 * b.abs());
        }

        #[test]
        fn direction_angles_roundtrip(th in 0.01..3.13f64, ph in -3.1..3.1f64) {
            let (t2, p2) = direction_angles(&spherical_unit_vector(th, ph));
            prop_assert!((t2 - th).abs() < 1e-9);
            prop_assert!(wrap_pi(p2 - ph).abs() < 1e-9);
        }
    }
}
