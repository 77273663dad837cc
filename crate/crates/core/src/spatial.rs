//! Spatially consistent mobility (SC-I style procedure).
//!
//! Each cluster gets a frozen anchor geometry at the first drop:
//! an arrival scatterer point at distance d3D from the MS along the
//! cluster's arrival direction, and a departure image point at the
//! cluster's total path length from the BS along its departure direction.
//! The image is carried along with the MS displacement. Each update moves
//! the MS, then reads the new delays and angles off that geometry and
//! re-derives the powers from the delays. The geometry is fixed, so the
//! updates are continuous in the step length and reversible.
//!
//! Delays are kept relative to the initial LOS delay d3D(0)/c, which gives
//! an index-stable reference for the whole track.

use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gscm::{draw_drop, Angles, ClusterSet, LinkConfig, ModelData};
use crate::rng::{derive_seed, stream};
use crate::scenario::{direction_angles, spherical_unit_vector, wrap_pi, LinkState, Position3D, SPEED_OF_LIGHT};

/// Largest MS displacement allowed in one update, m.
pub const MAX_STEP: f64 = 1.0;

/// Default large-scale correlation distance, m.
pub const DEFAULT_CORRELATION_DISTANCE: f64 = 15.0;

/// Piecewise-linear MS route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub waypoints: Vec<Position3D>,
    /// m/s
    pub speed: f64,
    /// Distance between channel updates, m.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_corr")]
    pub correlation_distance: f64,
}

fn default_step() -> f64 {
    0.1
}

fn default_corr() -> f64 {
    DEFAULT_CORRELATION_DISTANCE
}

impl Trajectory {
    pub fn new(waypoints: Vec<Position3D>, speed: f64) -> Self {
        Self {
            waypoints,
            speed,
            step: default_step(),
            correlation_distance: default_corr(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::invalid("trajectory needs at least one waypoint"));
        }
        if self
            .waypoints
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(Error::invalid("trajectory waypoints must be finite"));
        }
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return Err(Error::invalid(format!("speed must be > 0 (got {})", self.speed)));
        }
        if !(self.step > 0.0) || !(self.correlation_distance > 0.0) {
            return Err(Error::invalid("step and correlation distance must be > 0"));
        }
        if self.step > self.correlation_distance {
            return Err(Error::invalid(format!(
                "step {} m exceeds the correlation distance {} m",
                self.step, self.correlation_distance
            )));
        }
        Ok(())
    }

    /// Update interval Δt = Δd / v, s.
    pub fn update_interval(&self) -> f64 {
        self.step / self.speed
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Sample points every `step` metres along the route, always ending on
    /// the last waypoint. Returns (position, cumulative distance).
    pub fn samples(&self) -> Result<Vec<(Position3D, f64)>> {
        self.validate()?;
        let total = self.length();
        let n = (total / self.step + 1e-9).floor() as usize;
        let mut out: Vec<(Position3D, f64)> = (0..=n)
            .map(|k| (self.point_at(k as f64 * self.step), k as f64 * self.step))
            .collect();
        if total - out[out.len() - 1].1 > 1e-9 {
            out.push((*self.waypoints.last().unwrap(), total));
        }
        Ok(out)
    }

    /// Reversed route with the same settings.
    pub fn reversed(&self) -> Self {
        let mut t = self.clone();
        t.waypoints.reverse();
        t
    }

    fn point_at(&self, s: f64) -> Position3D {
        let mut left = s;
        for w in self.waypoints.windows(2) {
            let seg = w[0].distance(&w[1]);
            if left <= seg && seg > 0.0 {
                let a = w[0].to_vector();
                let b = w[1].to_vector();
                return Position3D::from_vector(&(a + (b - a) * (left / seg)));
            }
            left -= seg;
        }
        *self.waypoints.last().unwrap()
    }
}

/// Frozen per-cluster geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterAnchor {
    /// Arrival-side scatterer point.
    pub scatterer: Vector3<f64>,
    /// Departure-side image of the MS; moves with the MS.
    pub image: Vector3<f64>,
}

/// Channel state carried from one update to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct MobileChannelState {
    pub clusters: ClusterSet,
    pub anchors: Vec<ClusterAnchor>,
    pub ms_pos: Position3D,
    pub bs_pos: Position3D,
}

impl MobileChannelState {
    /// Attach anchors to a freshly drawn cluster set at (`bs`, `ms`).
    pub fn from_drop(clusters: ClusterSet, bs: Position3D, ms: Position3D) -> Self {
        let (b, m) = (bs.to_vector(), ms.to_vector());
        let d3d = (m - b).norm();
        let anchors = clusters
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 && clusters.state == LinkState::Los {
                    return ClusterAnchor { scatterer: b, image: m };
                }
                let len = d3d + SPEED_OF_LIGHT * c.delay;
                ClusterAnchor {
                    scatterer: m + spherical_unit_vector(c.angles.zoa, c.angles.aoa) * d3d,
                    image: b + spherical_unit_vector(c.angles.zod, c.angles.aod) * len,
                }
            })
            .collect();
        Self {
            clusters,
            anchors,
            ms_pos: ms,
            bs_pos: bs,
        }
    }
}

/// Advance the state by MS velocity `velocity` (m/s, Cartesian) over `dt` s.
pub fn sc_update_step(prev: &MobileChannelState, velocity: &Vector3<f64>, dt: f64) -> Result<MobileChannelState> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("update interval must be >= 0 (got {dt})")));
    }
    let disp = velocity * dt;
    move_to(prev, &disp)
}

/// Advance the state by an MS displacement, m.
pub fn sc_move(prev: &MobileChannelState, to: Position3D) -> Result<MobileChannelState> {
    move_to(prev, &(to.to_vector() - prev.ms_pos.to_vector()))
}

fn move_to(prev: &MobileChannelState, disp: &Vector3<f64>) -> Result<MobileChannelState> {
    let dist = disp.norm();
    if !dist.is_finite() || dist > MAX_STEP {
        return Err(Error::invalid(format!(
            "MS moved {dist} m in one update; the limit is {MAX_STEP} m"
        )));
    }
    let mut next = prev.clone();
    if dist == 0.0 {
        return Ok(next);
    }
    let old = prev.ms_pos.to_vector();
    let new = old + disp;
    let b = prev.bs_pos.to_vector();
    for (c, a) in next.clusters.clusters.iter_mut().zip(next.anchors.iter_mut()) {
        c.delay += ((a.scatterer - new).norm() - (a.scatterer - old).norm()) / SPEED_OF_LIGHT;
        a.image += disp;
        let (zoa, aoa) = direction_angles(&(a.scatterer - new));
        let (zod, aod) = direction_angles(&(a.image - b));
        let delta = Angles {
            aod: wrap_pi(aod - c.angles.aod),
            zod: zod - c.angles.zod,
            aoa: wrap_pi(aoa - c.angles.aoa),
            zoa: zoa - c.angles.zoa,
        };
        c.angles = Angles { aod, zod, aoa, zoa };
        for r in &mut c.rays {
            r.angles = Angles {
                aod: wrap_pi(r.angles.aod + delta.aod),
                zod: r.angles.zod + delta.zod,
                aoa: wrap_pi(r.angles.aoa + delta.aoa),
                zoa: r.angles.zoa + delta.zoa,
            };
        }
        if let Some(s) = c.specular.as_mut() {
            s.angles = c.angles;
        }
    }
    next.clusters.rederive_powers();
    next.ms_pos = Position3D::from_vector(&new);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackMode {
    /// Spatially consistent updates from one initial drop.
    #[serde(rename = "sc-i")]
    ScI,
    /// Independent drop at every step.
    #[serde(rename = "drop")]
    DropBased,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackStep {
    pub cum_dist: f64,
    pub ms_pos: Position3D,
    pub clusters: ClusterSet,
}

/// Per-step cluster snapshots along a route; cluster index is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvingClusterTrack {
    pub mode: TrackMode,
    pub steps: Vec<TrackStep>,
}

impl EvolvingClusterTrack {
    /// Delay of `cluster` at every step, s.
    pub fn delays(&self, cluster: usize) -> Vec<f64> {
        self.steps.iter().map(|s| s.clusters.clusters[cluster].delay).collect()
    }

    pub fn num_clusters(&self) -> usize {
        self.steps.first().map_or(0, |s| s.clusters.len())
    }

    /// Fraction of (step, cluster) transitions whose delay jump exceeds
    /// (Δd/c)(1 + `eps`). Only `cluster` if given.
    pub fn lipschitz_violation_fraction(&self, cluster: Option<usize>, eps: f64) -> f64 {
        let list: Vec<usize> = match cluster {
            Some(c) => vec![c],
            None => (0..self.num_clusters()).collect(),
        };
        let (mut bad, mut total) = (0usize, 0usize);
        for w in self.steps.windows(2) {
            let bound = (w[1].cum_dist - w[0].cum_dist) / SPEED_OF_LIGHT * (1.0 + eps);
            for &c in &list {
                total += 1;
                if (w[1].clusters.clusters[c].delay - w[0].clusters.clusters[c].delay).abs() > bound {
                    bad += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            bad as f64 / total as f64
        }
    }

    /// Write `step,cum_dist_m,cluster,delay_ns,aod_deg,aoa_deg,power_db` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,cum_dist_m,cluster,delay_ns,aod_deg,aoa_deg,power_db")?;
        for (k, s) in self.steps.iter().enumerate() {
            for (n, c) in s.clusters.clusters.iter().enumerate() {
                writeln!(
                    w,
                    "{k},{},{n},{},{},{},{}",
                    s.cum_dist,
                    c.delay * 1e9,
                    wrap_pi(c.angles.aod).to_degrees(),
                    wrap_pi(c.angles.aoa).to_degrees(),
                    10.0 * c.power.log10()
                )?;
            }
        }
        Ok(())
    }
}

/// Initial drop at the route start; identical to step 0 of the drop-based
/// track for the same seed.
pub fn initial_state(cfg: &LinkConfig, data: &ModelData, start: Position3D, seed: u64) -> Result<MobileChannelState> {
    let (_, set) = drop_at(cfg, data, start, seed, 0)?;
    Ok(MobileChannelState::from_drop(set, cfg.bs, start))
}

fn drop_at(cfg: &LinkConfig, data: &ModelData, ms: Position3D, seed: u64, k: u64) -> Result<(LinkState, ClusterSet)> {
    let mut c = cfg.clone();
    c.ms = ms;
    let mut rng = stream(derive_seed(seed, k), 0);
    let (state, _, set) = draw_drop(&c, data, &mut rng)?;
    Ok((state, set))
}

/// Continue a state along given positions (the first is the current one).
pub fn sc_track(init: MobileChannelState, samples: &[(Position3D, f64)]) -> Result<EvolvingClusterTrack> {
    let mut steps = Vec::with_capacity(samples.len());
    let mut state = init;
    for (i, &(p, d)) in samples.iter().enumerate() {
        if i > 0 {
            state = sc_move(&state, p)?;
        }
        steps.push(TrackStep {
            cum_dist: d,
            ms_pos: state.ms_pos,
            clusters: state.clusters.clone(),
        });
    }
    Ok(EvolvingClusterTrack {
        mode: TrackMode::ScI,
        steps,
    })
}

/// Run a route. `cfg.ms` is ignored; positions come from the route.
pub fn simulate_trajectory(
    cfg: &LinkConfig,
    data: &ModelData,
    traj: &Trajectory,
    mode: TrackMode,
    seed: u64,
) -> Result<EvolvingClusterTrack> {
    let samples = traj.samples()?;
    match mode {
        TrackMode::ScI => sc_track(initial_state(cfg, data, samples[0].0, seed)?, &samples),
        TrackMode::DropBased => {
            let mut steps = Vec::with_capacity(samples.len());
            let mut n = None;
            for (k, &(p, d)) in samples.iter().enumerate() {
                let (_, set) = drop_at(cfg, data, p, seed, k as u64)?;
                // a probabilistic LOS state can change N between drops
                let len = *n.get_or_insert(set.len());
                if set.len() != len {
                    return Err(Error::invalid(
                        "drop-based track changed cluster count; force the link state",
                    ));
                }
                steps.push(TrackStep {
                    cum_dist: d,
                    ms_pos: p,
                    clusters: set,
                });
            }
            Ok(EvolvingClusterTrack {
                mode: TrackMode::DropBased,
                steps,
            })
        }
    }
}
