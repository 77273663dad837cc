//! Element patterns, planar array layout, steering and composite gain maps.
//!
//! Arrays lie in the y-z plane with boresight along +x: columns are spaced
//! `d_h` wavelengths along y and rows `d_v` wavelengths along z. Public
//! functions take angles in degrees (zenith from +z, azimuth from +x).

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::spherical_unit_vector;

/// Single-element power pattern with a parabolic (in dB) main lobe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElementPattern {
    pub max_gain_dbi: f64,
    pub hpbw_azimuth_deg: f64,
    pub hpbw_zenith_deg: f64,
    /// Maximum attenuation relative to boresight, dB.
    pub front_back_db: f64,
    pub slant_deg: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            max_gain_dbi: 8.0,
            hpbw_azimuth_deg: 65.0,
            hpbw_zenith_deg: 65.0,
            front_back_db: 30.0,
            slant_deg: 0.0,
        }
    }
}

impl ElementPattern {
    /// 0 dBi in every direction, vertically polarized.
    pub fn isotropic() -> Self {
        Self {
            max_gain_dbi: 0.0,
            front_back_db: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hpbw_azimuth_deg > 0.0 && self.hpbw_zenith_deg > 0.0) {
            return Err(Error::invalid("element beamwidths must be > 0"));
        }
        if !(self.front_back_db >= 0.0) {
            return Err(Error::invalid("element front-to-back floor must be >= 0"));
        }
        Ok(())
    }

    /// Gain in dBi; angles in radians.
    pub fn gain_dbi_rad(&self, theta: f64, phi: f64) -> f64 {
        let theta_deg = theta.to_degrees();
        let phi_deg = wrap_180(phi.to_degrees());
        let floor = self.front_back_db;
        let a_v = -(12.0 * ((theta_deg - 90.0) / self.hpbw_zenith_deg).powi(2)).min(floor);
        let a_h = -(12.0 * (phi_deg / self.hpbw_azimuth_deg).powi(2)).min(floor);
        self.max_gain_dbi - (-(a_v + a_h)).min(floor)
    }

    /// (F_theta, F_phi) field components for polarization slant `slant` (rad).
    pub fn field_rad(&self, theta: f64, phi: f64, slant: f64) -> [f64; 2] {
        let amp = 10f64.powf(self.gain_dbi_rad(theta, phi) / 20.0);
        [amp * slant.cos(), amp * slant.sin()]
    }
}

/// Element gain in dBi at zenith `theta_deg`, azimuth `phi_deg`.
pub fn element_gain(p: &ElementPattern, theta_deg: f64, phi_deg: f64) -> f64 {
    p.gain_dbi_rad(theta_deg.to_radians(), phi_deg.to_radians())
}

fn wrap_180(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// Uniform planar array, optionally dual-polarized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaArraySpec {
    pub rows: usize,
    pub columns: usize,
    #[serde(default = "one")]
    pub polarizations: usize,
    /// Horizontal spacing, wavelengths.
    #[serde(default = "default_dh")]
    pub d_h: f64,
    /// Vertical spacing, wavelengths.
    #[serde(default = "default_dv")]
    pub d_v: f64,
    #[serde(default)]
    pub element: ElementPattern,
    /// Boresight azimuth, deg (0 = +x).
    #[serde(default)]
    pub bearing_deg: f64,
}

fn one() -> usize {
    1
}

fn default_dh() -> f64 {
    0.5
}

fn default_dv() -> f64 {
    0.7
}

/// One physical element port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayElement {
    /// Location relative to the array origin, m.
    pub position: Vector3<f64>,
    /// Polarization slant, rad.
    pub slant: f64,
}

impl AntennaArraySpec {
    pub fn new(rows: usize, columns: usize, polarizations: usize) -> Self {
        Self {
            rows,
            columns,
            polarizations,
            d_h: default_dh(),
            d_v: default_dv(),
            element: ElementPattern::default(),
            bearing_deg: 0.0,
        }
    }

    /// A single co-polarized isotropic element.
    pub fn isotropic() -> Self {
        Self {
            element: ElementPattern::isotropic(),
            ..Self::new(1, 1, 1)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.columns == 0 {
            return Err(Error::invalid("array needs at least one row and one column"));
        }
        if !matches!(self.polarizations, 1 | 2) {
            return Err(Error::invalid(format!(
                "polarizations must be 1 or 2, got {}",
                self.polarizations
            )));
        }
        if !(self.d_h > 0.0 && self.d_v > 0.0) {
            return Err(Error::invalid("element spacings must be > 0"));
        }
        self.element.validate()
    }

    /// Elements per polarization.
    pub fn elements_per_pol(&self) -> usize {
        self.rows * self.columns
    }

    pub fn num_elements(&self) -> usize {
        self.elements_per_pol() * self.polarizations
    }

    /// Element locations of one polarization, m, row-major (row, column).
    pub fn positions(&self, wavelength: f64) -> Vec<Vector3<f64>> {
        let (sb, cb) = self.bearing_deg.to_radians().sin_cos();
        let mut out = Vec::with_capacity(self.elements_per_pol());
        for r in 0..self.rows {
            for c in 0..self.columns {
                let y = c as f64 * self.d_h * wavelength;
                out.push(Vector3::new(-sb * y, cb * y, r as f64 * self.d_v * wavelength));
            }
        }
        out
    }

    /// Element field (F_theta, F_phi) towards global (theta, phi), rad.
    pub fn field(&self, theta: f64, phi: f64, slant: f64) -> [f64; 2] {
        self.element
            .field_rad(theta, phi - self.bearing_deg.to_radians(), slant)
    }

    /// All ports, polarization-major. Dual-polarized arrays use ±45° slants.
    pub fn elements(&self, wavelength: f64) -> Vec<ArrayElement> {
        let slants: Vec<f64> = if self.polarizations == 2 {
            vec![PI / 4.0, -PI / 4.0]
        } else {
            vec![self.element.slant_deg.to_radians()]
        };
        let pos = self.positions(wavelength);
        slants
            .iter()
            .flat_map(|&slant| pos.iter().map(move |&position| ArrayElement { position, slant }))
            .collect()
    }
}

/// Phase vector `exp(j 2π r̂·d_m / λ)` for arbitrary element locations (m).
pub fn steering_vector_at(positions: &[Vector3<f64>], wavelength: f64, theta_deg: f64, phi_deg: f64) -> Vec<Complex64> {
    let r = spherical_unit_vector(theta_deg.to_radians(), phi_deg.to_radians());
    positions
        .iter()
        .map(|d| Complex64::from_polar(1.0, 2.0 * PI * r.dot(d) / wavelength))
        .collect()
}

/// Steering vector of one polarization of `spec`, length rows·columns.
pub fn steering_vector(spec: &AntennaArraySpec, wavelength: f64, theta_deg: f64, phi_deg: f64) -> Vec<Complex64> {
    steering_vector_at(&spec.positions(wavelength), wavelength, theta_deg, phi_deg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GainNormalization {
    /// Element gain plus array gain `10 log(|AF|²/N)`; the steered peak
    /// equals element gain + 10 log N.
    #[default]
    ArrayGain,
    /// Directivity: linear pattern divided by its mean over the sphere.
    Directivity,
}

/// Regular angle grid in degrees, both ends included.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
}

impl AngleGrid {
    /// Full sphere, θ ∈ [0, 180], φ ∈ [-180, 180].
    pub fn full(step_deg: f64) -> Result<Self> {
        Self::range((0.0, 180.0), (-180.0, 180.0), step_deg)
    }

    pub fn range(theta: (f64, f64), phi: (f64, f64), step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg <= 1.0) {
            return Err(Error::invalid(format!(
                "grid step must be in (0, 1] deg, got {step_deg}"
            )));
        }
        if !(theta.0 >= 0.0 && theta.1 <= 180.0 && theta.0 < theta.1 && phi.0 < phi.1) {
            return Err(Error::invalid("grid ranges are empty or outside the sphere"));
        }
        let axis = |lo: f64, hi: f64| {
            let n = ((hi - lo) / step_deg).round() as usize;
            (0..=n)
                .map(|i| lo + (hi - lo) * i as f64 / n as f64)
                .collect::<Vec<_>>()
        };
        Ok(Self {
            theta_deg: axis(theta.0, theta.1),
            phi_deg: axis(phi.0, phi.1),
        })
    }

    fn phi_is_periodic(&self) -> bool {
        let span = self.phi_deg.last().unwrap() - self.phi_deg[0];
        (span - 360.0).abs() < 1e-9
    }
}

/// Gain values over an [`AngleGrid`], row-major in (θ, φ).
#[derive(Debug, Clone, PartialEq)]
pub struct GainMap {
    pub grid: AngleGrid,
    pub gain_dbi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    Azimuth,
    Zenith,
}

impl GainMap {
    pub fn from_values(grid: AngleGrid, gain_dbi: Vec<f64>) -> Result<Self> {
        if gain_dbi.len() != grid.theta_deg.len() * grid.phi_deg.len() {
            return Err(Error::invalid("gain map size does not match its grid"));
        }
        Ok(Self { grid, gain_dbi })
    }

    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.gain_dbi[i_theta * self.grid.phi_deg.len() + i_phi]
    }

    /// (θ index, φ index, gain) of the maximum.
    pub fn peak_index(&self) -> (usize, usize, f64) {
        let np = self.grid.phi_deg.len();
        let (k, g) = self
            .gain_dbi
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, g)| if g > acc.1 { (k, g) } else { acc },
            );
        (k / np, k % np, g)
    }

    /// (θ, φ, gain) of the maximum, degrees and dBi.
    pub fn peak(&self) -> (f64, f64, f64) {
        let (i, j, g) = self.peak_index();
        (self.grid.theta_deg[i], self.grid.phi_deg[j], g)
    }

    /// Mean of the linear gain over the sphere (1 for a lossless, normalized
    /// pattern). Requires a full-sphere grid.
    pub fn sphere_mean_linear(&self) -> f64 {
        let th = &self.grid.theta_deg;
        let ph = &self.grid.phi_deg;
        let mut acc = 0.0;
        for i in 0..th.len() {
            let w_t = trapezoid_weight(th, i) * th[i].to_radians().sin();
            for j in 0..ph.len() {
                acc += w_t * trapezoid_weight(ph, j) * 10f64.powf(self.get(i, j) / 10.0);
            }
        }
        acc * (PI / 180.0).powi(2) / (4.0 * PI)
    }

    /// Write `theta_deg,phi_deg,gain_dbi` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta_deg,phi_deg,gain_dbi")?;
        for (i, t) in self.grid.theta_deg.iter().enumerate() {
            for (j, p) in self.grid.phi_deg.iter().enumerate() {
                writeln!(w, "{t},{p},{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

fn trapezoid_weight(axis: &[f64], i: usize) -> f64 {
    let n = axis.len();
    let left = if i > 0 { axis[i] - axis[i - 1] } else { 0.0 };
    let right = if i + 1 < n { axis[i + 1] - axis[i] } else { 0.0 };
    0.5 * (left + right)
}

/// Composite gain map of `spec` (one polarization) steered to
/// (`theta0`, `phi0`) degrees.
pub fn array_gain_pattern(
    spec: &AntennaArraySpec,
    steer_to: (f64, f64),
    grid: &AngleGrid,
    normalization: GainNormalization,
) -> Result<GainMap> {
    spec.validate()?;
    let (theta0, phi0) = steer_to;
    let n = spec.elements_per_pol() as f64;
    let raw = |grid: &AngleGrid| -> Vec<f64> {
        grid.theta_deg
            .par_iter()
            .flat_map_iter(|&t| {
                grid.phi_deg.iter().map(move |&p| {
                    let local = p - spec.bearing_deg;
                    let af = array_factor_power(spec, theta0, phi0 - spec.bearing_deg, t, local);
                    element_gain(&spec.element, t, local) + 10.0 * (af / n).log10()
                })
            })
            .collect()
    };
    let mut gain = raw(grid);
    if normalization == GainNormalization::Directivity {
        let fine = AngleGrid::full(0.25)?;
        let reference = GainMap::from_values(fine.clone(), raw(&fine))?;
        let mean_db = 10.0 * reference.sphere_mean_linear().log10();
        for g in &mut gain {
            *g -= mean_db;
        }
    }
    GainMap::from_values(grid.clone(), gain)
}

/// |AF|² of the steered uniform planar array at local (θ, φ), degrees. The
/// layout is separable so the sum factors into row and column sums.
fn array_factor_power(spec: &AntennaArraySpec, theta0: f64, phi0: f64, theta: f64, phi: f64) -> f64 {
    let r = spherical_unit_vector(theta.to_radians(), phi.to_radians());
    let r0 = spherical_unit_vector(theta0.to_radians(), phi0.to_radians());
    let psi_col = 2.0 * PI * spec.d_h * (r.y - r0.y);
    let psi_row = 2.0 * PI * spec.d_v * (r.z - r0.z);
    uniform_sum_power(spec.columns, psi_col) * uniform_sum_power(spec.rows, psi_row)
}

/// |Σ_{k<n} e^{jkψ}|².
fn uniform_sum_power(n: usize, psi: f64) -> f64 {
    let half = 0.5 * psi;
    let s = half.sin();
    if s.abs() < 1e-12 {
        return (n * n) as f64;
    }
    let v = (n as f64 * half).sin() / s;
    v * v
}

/// Half-power beamwidth (deg) along the cut through the peak.
///
/// Edges are located by linear interpolation between grid points. A cut
/// that never drops 3 dB below the peak returns its full span.
pub fn hpbw(map: &GainMap, cut: Cut) -> Result<f64> {
    let (pi, pj, peak) = map.peak_index();
    let (axis, values, periodic): (&[f64], Vec<f64>, bool) = match cut {
        Cut::Azimuth => (
            &map.grid.phi_deg,
            (0..map.grid.phi_deg.len()).map(|j| map.get(pi, j)).collect(),
            map.grid.phi_is_periodic(),
        ),
        Cut::Zenith => (
            &map.grid.theta_deg,
            (0..map.grid.theta_deg.len()).map(|i| map.get(i, pj)).collect(),
            false,
        ),
    };
    let mut idx = match cut {
        Cut::Azimuth => pj,
        Cut::Zenith => pi,
    };
    let level = peak - 3.0;
    let span = axis[axis.len() - 1] - axis[0];
    if values.iter().all(|&v| v >= level) {
        return Ok(span);
    }
    let last = values.len() - 1;
    if !periodic && (idx == 0 || idx == last) {
        return Err(Error::invalid("beam peak lies on the grid boundary"));
    }
    if periodic && idx == last {
        idx = 0;
    }
    // In a periodic cut the first and last samples coincide; walk modulo `last`.
    let step = |k: usize, dir: isize| -> Option<usize> {
        let next = k as isize + dir;
        if periodic {
            Some(next.rem_euclid(last as isize) as usize)
        } else if next < 0 || next as usize > last {
            None
        } else {
            Some(next as usize)
        }
    };
    let mut width = 0.0;
    for dir in [-1isize, 1] {
        let mut k = idx;
        let mut travelled = 0.0;
        loop {
            let next = step(k, dir).ok_or_else(|| Error::invalid("main lobe extends past the grid boundary"))?;
            let delta = if periodic && ((dir < 0 && k == 0) || (dir > 0 && next == 0)) {
                axis[1] - axis[0]
            } else {
                (axis[next] - axis[k]).abs()
            };
            if values[next] < level {
                let frac = (values[k] - level) / (values[k] - values[next]);
                travelled += frac * delta;
                break;
            }
            travelled += delta;
            k = next;
            if travelled > span {
                return Ok(span);
            }
        }
        width += travelled;
    }
    Ok(width)
}
