use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use super::lsp::LargeScaleParams;
use super::params::ScenarioParams;
use crate::error::{Error, Result};
use crate::scenario::LinkState;

/// Ray offset angles within a cluster, in units of the intra-cluster spread.
pub const RAY_OFFSETS: [f64; 10] = [
    0.0447, 0.1413, 0.2492, 0.3715, 0.5129, 0.6797, 0.8844, 1.1481, 1.5195, 2.1551,
];

/// Mean arrival/departure directions of one path, rad.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Angles {
    pub aod: f64,
    pub zod: f64,
    pub aoa: f64,
    pub zoa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub angles: Angles,
    /// Cross-polarization power ratio κ, linear.
    pub xpr: f64,
    /// Initial phases [θθ, θφ, φθ, φφ], rad in (-π, π].
    pub phases: [f64; 4],
}

/// Direct path carried alongside the first cluster in LOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecularRay {
    pub power: f64,
    pub angles: Angles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Excess delay, s.
    pub delay: f64,
    /// Power including any specular part, linear.
    pub power: f64,
    /// Per-cluster shadowing term, dB.
    pub shadow_db: f64,
    pub angles: Angles,
    pub rays: Vec<Ray>,
    pub specular: Option<SpecularRay>,
}

impl Cluster {
    /// Power shared by the diffuse rays.
    pub fn diffuse_power(&self) -> f64 {
        self.power - self.specular.map_or(0.0, |s| s.power)
    }
}

/// Clusters of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    pub state: LinkState,
    /// Ricean K, dB, for LOS sets.
    pub k_db: Option<f64>,
    /// Delay spread used to derive the powers, s.
    pub ds: f64,
    pub r_tau: f64,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn delays(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.delay).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.power).collect()
    }

    /// Recompute powers from the current delays, keeping per-cluster shadowing.
    pub fn rederive_powers(&mut self) {
        let delays = self.delays();
        let shadows: Vec<f64> = self.clusters.iter().map(|c| c.shadow_db).collect();
        let p = cluster_powers_from(&delays, self.ds, self.r_tau, &shadows, self.k_db);
        for (c, pn) in self.clusters.iter_mut().zip(p) {
            if let Some(s) = c.specular.as_mut() {
                s.power = los_fraction(self.k_db);
            }
            c.power = pn;
        }
    }
}

/// Exponentially distributed cluster delays, sorted, first at zero.
pub fn generate_cluster_delays<R: Rng + ?Sized>(ds: f64, r_tau: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(ds > 0.0) || !(r_tau > 1.0) || n == 0 {
        return Err(Error::invalid(format!(
            "cluster delays need DS > 0, r_tau > 1, N >= 1 (got {ds}, {r_tau}, {n})"
        )));
    }
    let mut tau: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            -r_tau * ds * u.ln()
        })
        .collect();
    tau.sort_by(f64::total_cmp);
    let t0 = tau[0];
    for t in &mut tau {
        *t -= t0;
    }
    Ok(tau)
}

/// Specular share of the total power for a Ricean K in dB.
fn los_fraction(k_db: Option<f64>) -> f64 {
    match k_db {
        None => 0.0,
        Some(k) if k == f64::INFINITY => 1.0,
        Some(k) => {
            let kr = 10f64.powf(k / 10.0);
            kr / (kr + 1.0)
        }
    }
}

/// Deterministic part of the power model given per-cluster shadowing.
pub fn cluster_powers_from(delays: &[f64], ds: f64, r_tau: f64, shadows_db: &[f64], k_db: Option<f64>) -> Vec<f64> {
    let raw: Vec<f64> = delays
        .iter()
        .zip(shadows_db)
        .map(|(&t, &z)| (-t * (r_tau - 1.0) / (r_tau * ds)).exp() * 10f64.powf(-z / 10.0))
        .collect();
    let sum: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    if k_db.is_some() {
        let f = los_fraction(k_db);
        for x in &mut p {
            *x *= 1.0 - f;
        }
        p[0] += f;
    }
    p
}

/// Normalized cluster powers and the per-cluster shadowing draws (dB).
pub fn generate_cluster_powers<R: Rng + ?Sized>(
    delays: &[f64],
    ds: f64,
    r_tau: f64,
    zeta_db: f64,
    k_db: Option<f64>,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if delays.is_empty() || !(zeta_db >= 0.0) || !(ds > 0.0) {
        return Err(Error::invalid("cluster powers need delays, DS > 0 and zeta >= 0"));
    }
    let shadows: Vec<f64> = delays
        .iter()
        .map(|_| zeta_db * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((cluster_powers_from(delays, ds, r_tau, &shadows, k_db), shadows))
}

const C_PHI: [(usize, f64); 12] = [
    (4, 0.779),
    (5, 0.860),
    (8, 1.018),
    (10, 1.090),
    (11, 1.123),
    (12, 1.146),
    (14, 1.190),
    (15, 1.211),
    (16, 1.226),
    (19, 1.273),
    (20, 1.289),
    (25, 1.358),
];

const C_THETA: [(usize, f64); 8] = [
    (8, 0.889),
    (10, 0.957),
    (11, 1.031),
    (12, 1.104),
    (15, 1.1088),
    (19, 1.184),
    (20, 1.178),
    (25, 1.282),
];

fn lookup(table: &[(usize, f64)], n: usize) -> f64 {
    if n <= table[0].0 {
        return table[0].1;
    }
    for w in table.windows(2) {
        let ((n0, c0), (n1, c1)) = (w[0], w[1]);
        if n <= n1 {
            return c0 + (c1 - c0) * (n - n0) as f64 / (n1 - n0) as f64;
        }
    }
    table[table.len() - 1].1
}

/// Scaling constant of the azimuth mapping for `n` clusters.
pub fn c_phi(n: usize, k_db: Option<f64>) -> f64 {
    let c = lookup(&C_PHI, n);
    match k_db {
        Some(k) => c * (1.1035 - 0.028 * k - 0.002 * k * k + 0.0001 * k * k * k),
        None => c,
    }
}

/// Scaling constant of the zenith mapping for `n` clusters.
pub fn c_theta(n: usize, k_db: Option<f64>) -> f64 {
    let c = lookup(&C_THETA, n);
    match k_db {
        Some(k) => c * (1.3086 + 0.0339 * k - 0.0077 * k * k + 0.0002 * k * k * k),
        None => c,
    }
}

/// Angle spreads (deg) driving the cluster-angle mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSpreads {
    pub asd: f64,
    pub asa: f64,
    pub zsa: f64,
    pub zsd: f64,
}

impl AngleSpreads {
    pub fn from_lsps(l: &LargeScaleParams) -> Self {
        Self {
            asd: l.asd_deg(),
            asa: l.asa_deg(),
            zsa: l.zsa_deg(),
            zsd: l.zsd_deg(),
        }
    }
}

/// Intra-cluster spreads, deg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntraSpreads {
    pub asd: f64,
    pub asa: f64,
    pub zsa: f64,
    pub zsd: f64,
}

impl IntraSpreads {
    pub fn new(params: &ScenarioParams, mu_lg_zsd: f64) -> Self {
        Self {
            asd: params.c_asd_deg,
            asa: params.c_asa_deg,
            zsa: params.c_zsa_deg,
            zsd: 0.375 * 10f64.powf(mu_lg_zsd),
        }
    }

    pub fn zero() -> Self {
        Self {
            asd: 0.0,
            asa: 0.0,
            zsa: 0.0,
            zsd: 0.0,
        }
    }
}

/// Mean angles per cluster and per ray (`[cluster][ray]`), rad.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedAngles {
    pub clusters: Vec<Angles>,
    pub rays: Vec<Vec<Angles>>,
}

/// Map cluster powers to cluster and ray angles around the LOS
/// directions `mean` (rad).
///
/// Weaker clusters are placed farther from the reference direction. In
/// LOS the first cluster is pinned to it. `o2i` centres the arrival
/// zenith on the horizon.
#[allow(clippy::too_many_arguments)]
pub fn generate_angles<R: Rng + ?Sized>(
    powers: &[f64],
    spreads: &AngleSpreads,
    mean: &Angles,
    rays: usize,
    intra: &IntraSpreads,
    k_db: Option<f64>,
    o2i: bool,
    rng: &mut R,
) -> Result<GeneratedAngles> {
    let n = powers.len();
    if n == 0 || rays == 0 {
        return Err(Error::invalid("angle generation needs clusters and rays"));
    }
    if [spreads.asd, spreads.asa, spreads.zsa, spreads.zsd]
        .iter()
        .any(|s| !(*s > 0.0))
    {
        return Err(Error::invalid("angle spreads must be > 0"));
    }
    let pmax = powers.iter().copied().fold(f64::MIN, f64::max);
    let cphi = c_phi(n, k_db);
    let ctheta = c_theta(n, k_db);
    let los = k_db.is_some();

    let azimuth = |spread: f64, centre: f64, rng: &mut R| -> Vec<f64> {
        let vals: Vec<f64> = powers
            .iter()
            .map(|&p| {
                let prime = 2.0 * (spread / 1.4) * (-(p / pmax).ln()).max(0.0).sqrt() / cphi;
                let x = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let y = spread / 7.0 * rng.sample::<f64, _>(StandardNormal);
                x * prime + y
            })
            .collect();
        let first = if los { vals[0] } else { 0.0 };
        vals.iter().map(|v| v - first + centre).collect()
    };
    let zenith = |spread: f64, centre: f64, rng: &mut R| -> Vec<f64> {
        let vals: Vec<f64> = powers
            .iter()
            .map(|&p| {
                let prime = -spread * (p / pmax).ln() / ctheta;
                let x = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let y = spread / 7.0 * rng.sample::<f64, _>(StandardNormal);
                x * prime + y
            })
            .collect();
        let first = if los { vals[0] } else { 0.0 };
        vals.iter().map(|v| v - first + centre).collect()
    };

    let deg = |r: f64| r.to_degrees();
    let aoa = azimuth(spreads.asa, deg(mean.aoa), rng);
    let aod = azimuth(spreads.asd, deg(mean.aod), rng);
    let zoa_centre = if o2i { 90.0 } else { deg(mean.zoa) };
    let zoa = zenith(spreads.zsa, zoa_centre, rng);
    let zod = zenith(spreads.zsd, deg(mean.zod), rng);

    let offsets = ray_offsets(rays);
    let mut cl = Vec::with_capacity(n);
    let mut ray_sets = Vec::with_capacity(n);
    for i in 0..n {
        let c = Angles {
            aod: wrap_azimuth_deg(aod[i]).to_radians(),
            zod: fold_zenith_deg(zod[i]).to_radians(),
            aoa: wrap_azimuth_deg(aoa[i]).to_radians(),
            zoa: fold_zenith_deg(zoa[i]).to_radians(),
        };
        // Random coupling: AOA keeps the offset order, the others are shuffled.
        let mut p_aod: Vec<usize> = (0..rays).collect();
        let mut p_zoa = p_aod.clone();
        let mut p_zod = p_aod.clone();
        p_aod.shuffle(rng);
        p_zoa.shuffle(rng);
        p_zod.shuffle(rng);
        let rs: Vec<Angles> = (0..rays)
            .map(|m| Angles {
                aoa: wrap_azimuth_deg(aoa[i] + intra.asa * offsets[m]).to_radians(),
                aod: wrap_azimuth_deg(aod[i] + intra.asd * offsets[p_aod[m]]).to_radians(),
                zoa: fold_zenith_deg(zoa[i] + intra.zsa * offsets[p_zoa[m]]).to_radians(),
                zod: fold_zenith_deg(zod[i] + intra.zsd * offsets[p_zod[m]]).to_radians(),
            })
            .collect();
        cl.push(c);
        ray_sets.push(rs);
    }
    Ok(GeneratedAngles {
        clusters: cl,
        rays: ray_sets,
    })
}

/// ±offset pairs, or the first `rays` of them.
fn ray_offsets(rays: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * RAY_OFFSETS.len());
    for a in RAY_OFFSETS {
        v.push(a);
        v.push(-a);
    }
    v.truncate(rays);
    v
}

fn wrap_azimuth_deg(a: f64) -> f64 {
    (a + 180.0).rem_euclid(360.0) - 180.0
}

/// Reflect a zenith angle into [0, 180].
fn fold_zenith_deg(z: f64) -> f64 {
    let z = z.rem_euclid(360.0);
    if z > 180.0 {
        360.0 - z
    } else {
        z
    }
}

/// XPR and initial phases for every ray.
pub fn draw_polarization<R: Rng + ?Sized>(xpr_mu_db: f64, xpr_sigma_db: f64, rng: &mut R) -> (f64, [f64; 4]) {
    let x = xpr_mu_db + xpr_sigma_db * rng.sample::<f64, _>(StandardNormal);
    let mut phases = [0.0; 4];
    for p in &mut phases {
        *p = PI - 2.0 * PI * rng.random::<f64>();
    }
    (10f64.powf(x / 10.0), phases)
}

/// Full small-scale draw for one link: delays, powers, angles, XPR, phases.
pub fn generate_clusters<R: Rng + ?Sized>(
    params: &ScenarioParams,
    lsps: &LargeScaleParams,
    mean: &Angles,
    rng: &mut R,
) -> Result<ClusterSet> {
    let n = params.clusters;
    let ds = lsps.ds();
    let delays = generate_cluster_delays(ds, params.r_tau, n, rng)?;
    let (powers, shadows) = generate_cluster_powers(&delays, ds, params.r_tau, params.zeta_db, lsps.k_db, rng)?;
    let intra = IntraSpreads::new(params, lsps.mu_lg_zsd);
    let angles = generate_angles(
        &powers,
        &AngleSpreads::from_lsps(lsps),
        mean,
        params.rays,
        &intra,
        lsps.k_db,
        params.state == LinkState::O2i,
        rng,
    )?;
    let spec_power = los_fraction(lsps.k_db);
    let mut clusters = Vec::with_capacity(n);
    for (i, ((&delay, &power), &shadow_db)) in delays.iter().zip(&powers).zip(&shadows).enumerate() {
        let rays = angles.rays[i]
            .iter()
            .map(|&a| {
                let (xpr, phases) = draw_polarization(params.xpr_mu_db, params.xpr_sigma_db, rng);
                Ray { angles: a, xpr, phases }
            })
            .collect();
        let specular = (i == 0 && lsps.k_db.is_some()).then_some(SpecularRay {
            power: spec_power,
            angles: *mean,
        });
        clusters.push(Cluster {
            delay,
            power,
            shadow_db,
            angles: angles.clusters[i],
            rays,
            specular,
        });
    }
    Ok(ClusterSet {
        clusters,
        state: params.state,
        k_db: lsps.k_db,
        ds,
        r_tau: params.r_tau,
    })
}

/// One (delay, azimuth) sample from the exponential-Laplacian ADPD.
pub fn adpd_sample<R: Rng + ?Sized>(s_tau: f64, s_phi: f64, rng: &mut R) -> Result<(f64, f64)> {
    if !(s_tau > 0.0 && s_phi > 0.0) {
        return Err(Error::invalid("ADPD scales must be > 0"));
    }
    let exp = Exp::new(1.0 / s_tau).map_err(|e| Error::invalid(e.to_string()))?;
    let tau = exp.sample(rng);
    let mag = -s_phi * (1.0 - rng.random::<f64>()).ln();
    let phi = if rng.random::<bool>() { mag } else { -mag };
    Ok((tau, phi))
}
