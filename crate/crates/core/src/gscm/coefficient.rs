use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::clusters::{Angles, Cluster};
use crate::antenna::{AntennaArraySpec, ArrayElement};
use crate::error::{Error, Result};
use crate::scenario::{spherical_unit_vector, LinkGeometry};

/// Doppler shift (Hz) of a path arriving from (`zoa`, `aoa`) rad at an MS
/// moving with `velocity` (m/s).
pub fn doppler_frequency(zoa: f64, aoa: f64, velocity: &Vector3<f64>, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
    }
    Ok(spherical_unit_vector(zoa, aoa).dot(velocity) / wavelength)
}

/// Antenna ports and motion shared by every cluster of a link.
#[derive(Debug, Clone)]
pub struct CoefficientContext {
    pub tx: AntennaArraySpec,
    pub rx: AntennaArraySpec,
    tx_elements: Vec<ArrayElement>,
    rx_elements: Vec<ArrayElement>,
    pub wavelength: f64,
    pub velocity: Vector3<f64>,
    /// BS-MS distance, sets the phase of the direct path, m.
    pub d3d: f64,
}

impl CoefficientContext {
    pub fn new(tx: &AntennaArraySpec, rx: &AntennaArraySpec, geom: &LinkGeometry, wavelength: f64) -> Result<Self> {
        tx.validate()?;
        rx.validate()?;
        if !(wavelength > 0.0) {
            return Err(Error::invalid("wavelength must be > 0"));
        }
        Ok(Self {
            tx: *tx,
            rx: *rx,
            tx_elements: tx.elements(wavelength),
            rx_elements: rx.elements(wavelength),
            wavelength,
            velocity: geom.ms_velocity.to_vector(),
            d3d: geom.d3d,
        })
    }

    /// Number of receive (MS) ports.
    pub fn num_rx(&self) -> usize {
        self.rx_elements.len()
    }

    /// Number of transmit (BS) ports.
    pub fn num_tx(&self) -> usize {
        self.tx_elements.len()
    }

    /// Field-times-phase vectors of every port of one side.
    fn port_vectors(
        spec: &AntennaArraySpec,
        els: &[ArrayElement],
        theta: f64,
        phi: f64,
        wavelength: f64,
    ) -> Vec<[Complex64; 2]> {
        let r = spherical_unit_vector(theta, phi);
        els.iter()
            .map(|e| {
                let f = spec.field(theta, phi, e.slant);
                let ph = Complex64::from_polar(1.0, 2.0 * PI * r.dot(&e.position) / wavelength);
                [ph * f[0], ph * f[1]]
            })
            .collect()
    }

    /// Add `amp * a_uᵀ M b_s * e^{j2πνt}` for one path into `out` ([u][s][t]).
    fn accumulate(
        &self,
        angles: &Angles,
        m: &[[Complex64; 2]; 2],
        amp: f64,
        times: &[f64],
        out: &mut [Complex64],
    ) -> Result<()> {
        let a = Self::port_vectors(&self.rx, &self.rx_elements, angles.zoa, angles.aoa, self.wavelength);
        let b = Self::port_vectors(&self.tx, &self.tx_elements, angles.zod, angles.aod, self.wavelength);
        let nu = doppler_frequency(angles.zoa, angles.aoa, &self.velocity, self.wavelength)?;
        let rot: Vec<Complex64> = times
            .iter()
            .map(|&t| Complex64::from_polar(1.0, 2.0 * PI * nu * t))
            .collect();
        let c: Vec<[Complex64; 2]> = b
            .iter()
            .map(|bs| [m[0][0] * bs[0] + m[0][1] * bs[1], m[1][0] * bs[0] + m[1][1] * bs[1]])
            .collect();
        let nt = times.len();
        let ns = c.len();
        for (u, au) in a.iter().enumerate() {
            for (s, cs) in c.iter().enumerate() {
                let g = (au[0] * cs[0] + au[1] * cs[1]) * amp;
                let base = (u * ns + s) * nt;
                for (k, r) in rot.iter().enumerate() {
                    out[base + k] += g * r;
                }
            }
        }
        Ok(())
    }

    /// Coefficients of one cluster for all port pairs and times, laid out
    /// `[u][s][t]` with u the receive port.
    pub fn cluster_coefficients(&self, cluster: &Cluster, times: &[f64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.num_rx() * self.num_tx() * times.len()];
        let m_rays = cluster.rays.len();
        if m_rays > 0 {
            let amp = (cluster.diffuse_power().max(0.0) / m_rays as f64).sqrt();
            for ray in &cluster.rays {
                let x = (1.0 / ray.xpr).sqrt();
                let e = |p: f64| Complex64::from_polar(1.0, p);
                let m = [
                    [e(ray.phases[0]), e(ray.phases[1]) * x],
                    [e(ray.phases[2]) * x, e(ray.phases[3])],
                ];
                self.accumulate(&ray.angles, &m, amp, times, &mut out)?;
            }
        }
        if let Some(spec) = cluster.specular {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * self.d3d / self.wavelength);
            let m = [[phase, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), -phase]];
            self.accumulate(&spec.angles, &m, spec.power.sqrt(), times, &mut out)?;
        }
        Ok(out)
    }
}

/// `h_{u,s,n}(t)` for every port pair at one time, laid out `[u][s]`.
pub fn channel_coefficient(cluster: &Cluster, ctx: &CoefficientContext, t: f64) -> Result<Vec<Complex64>> {
    ctx.cluster_coefficients(cluster, &[t])
}
