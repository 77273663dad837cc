//! Geometry-based stochastic channel model.
//!
//! One drop runs: link state, pathloss, large-scale parameters, cluster
//! delays and powers, cluster and ray angles, polarization draws and
//! finally the per-port-pair coefficients.

mod clusters;
mod coefficient;
mod export;
mod lsp;
mod params;

pub use clusters::{
    adpd_sample, c_phi, c_theta, cluster_powers_from, draw_polarization, generate_angles, generate_cluster_delays,
    generate_cluster_powers, generate_clusters, AngleSpreads, Angles, Cluster, ClusterSet, GeneratedAngles,
    IntraSpreads, Ray, SpecularRay, RAY_OFFSETS,
};
pub use coefficient::{channel_coefficient, doppler_frequency, CoefficientContext};
pub use export::{read_tensor_binary, write_tensor_binary, write_tensor_csv, TENSOR_MAGIC, TENSOR_VERSION};
pub use lsp::{draw_lsps, draw_lsps_with, LargeScaleParams, LspCorrelation, LSP_COUNT, LSP_NAMES};
pub use params::{FreqArg, FreqExpr, Lsp, LspStatistics, ScenarioParameterTable, ScenarioParams, RAYS_PER_CLUSTER};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antenna::AntennaArraySpec;
use crate::error::{Error, Result};
use crate::link_state::{
    blockage_attenuation, draw_los_state, los_probability, o2i_loss, oxygen_loss, BlockerRegion, ClusterDirection,
    LosProbParams, MaterialMix, OxygenTable,
};
use crate::pathloss::{free_space_pathloss_db, pl_4g, pl_5g_uma, Scenario4g};
use crate::rng::{stream, SimRng};
use crate::scenario::{CarrierSpec, LinkGeometry, LinkState, Position3D, ScenarioKind, Velocity};

/// How the link state of a drop is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatePolicy {
    Forced(LinkState),
    Probabilistic(LosProbParams),
}

/// Pathloss reported in the tensor metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathlossChoice {
    /// 5G UMa for UMa, 4G UMi for UMi up to 6 GHz, free space otherwise.
    #[default]
    Auto,
    FreeSpace,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct O2iSettings {
    pub mix: MaterialMix,
    /// Indoor distance, m.
    pub d_in: f64,
}

/// Everything one drop needs apart from the seed.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub scenario: ScenarioKind,
    pub state: StatePolicy,
    pub carrier: CarrierSpec,
    pub bs: Position3D,
    pub ms: Position3D,
    pub velocity: Velocity,
    pub tx: AntennaArraySpec,
    pub rx: AntennaArraySpec,
    /// Sample times, s.
    pub times: Vec<f64>,
    pub pathloss: PathlossChoice,
    pub oxygen: bool,
    pub o2i: Option<O2iSettings>,
    pub blockage: Vec<BlockerRegion>,
    pub correlation: LspCorrelation,
}

impl LinkConfig {
    /// Single-port isotropic link at t = 0 with every extra disabled.
    pub fn new(scenario: ScenarioKind, state: LinkState, carrier: CarrierSpec, bs: Position3D, ms: Position3D) -> Self {
        Self {
            scenario,
            state: StatePolicy::Forced(state),
            carrier,
            bs,
            ms,
            velocity: Velocity::ZERO,
            tx: AntennaArraySpec::isotropic(),
            rx: AntennaArraySpec::isotropic(),
            times: vec![0.0],
            pathloss: PathlossChoice::Auto,
            oxygen: false,
            o2i: None,
            blockage: Vec::new(),
            correlation: LspCorrelation::identity(),
        }
    }

    pub fn geometry(&self) -> LinkGeometry {
        LinkGeometry::new(self.bs, self.ms, self.velocity)
    }
}

/// Data tables shared across drops.
#[derive(Debug, Clone)]
pub struct ModelData {
    pub params: ScenarioParameterTable,
    pub oxygen: OxygenTable,
}

impl ModelData {
    pub fn load() -> Result<Self> {
        Ok(Self {
            params: ScenarioParameterTable::load()?,
            oxygen: OxygenTable::load()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorMeta {
    pub f_c: f64,
    pub seed: u64,
    pub scenario: ScenarioKind,
    pub state: LinkState,
    pub pathloss_db: Option<f64>,
    /// Shadow fading plus any O2I excess, dB.
    pub shadow_db: f64,
    /// Through-wall plus indoor loss, dB.
    pub o2i_db: f64,
    /// Oxygen and blockage loss per cluster, dB; already applied to `data`.
    pub cluster_loss_db: Vec<f64>,
}

/// Complex coefficients `h[u][s][n][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCoefficientTensor {
    /// (U receive ports, S transmit ports, N clusters, T times)
    pub dims: [usize; 4],
    pub data: Vec<Complex64>,
    /// Cluster delays, s.
    pub delays: Vec<f64>,
    /// Sample times, s.
    pub times: Vec<f64>,
    pub meta: TensorMeta,
}

impl ChannelCoefficientTensor {
    pub fn index(&self, u: usize, s: usize, n: usize, t: usize) -> usize {
        let [_, ds, dn, dt] = self.dims;
        ((u * ds + s) * dn + n) * dt + t
    }

    pub fn get(&self, u: usize, s: usize, n: usize, t: usize) -> Complex64 {
        self.data[self.index(u, s, n, t)]
    }

    /// Σ_n |h_{u,s,n}(t)|².
    pub fn wideband_power(&self, u: usize, s: usize, t: usize) -> f64 {
        (0..self.dims[2]).map(|n| self.get(u, s, n, t).norm_sqr()).sum()
    }
}

/// Output of one drop.
#[derive(Debug, Clone)]
pub struct LinkRealization {
    pub tensor: ChannelCoefficientTensor,
    pub clusters: ClusterSet,
    pub lsps: LargeScaleParams,
    pub geometry: LinkGeometry,
}

fn mean_angles(geom: &LinkGeometry) -> Angles {
    let (zod, aod) = geom.los_departure_angles();
    let (zoa, aoa) = geom.los_arrival_angles();
    Angles { aod, zod, aoa, zoa }
}

fn pathloss_for(cfg: &LinkConfig, state: LinkState, geom: &LinkGeometry) -> Result<Option<f64>> {
    let f = cfg.carrier.f_ghz();
    let fs = || free_space_pathloss_db(cfg.carrier.f_c(), geom.d3d).map(Some);
    match cfg.pathloss {
        PathlossChoice::Off => Ok(None),
        PathlossChoice::FreeSpace => fs(),
        PathlossChoice::Auto => match cfg.scenario {
            ScenarioKind::Uma => {
                let (los, nlos) = pl_5g_uma(geom, f)?;
                Ok(Some(if state == LinkState::Los { los } else { nlos }))
            }
            ScenarioKind::UmiStreetCanyon if f <= 6.0 => {
                let s = if state == LinkState::Los {
                    LinkState::Los
                } else {
                    LinkState::Nlos
                };
                pl_4g(Scenario4g::Umi, s, geom, f, None).map(Some)
            }
            _ => fs(),
        },
    }
}

/// Draw the cluster set and large-scale parameters of one drop.
pub fn draw_drop(
    cfg: &LinkConfig,
    data: &ModelData,
    rng: &mut SimRng,
) -> Result<(LinkState, LargeScaleParams, ClusterSet)> {
    let geom = cfg.geometry();
    let state = match cfg.state {
        StatePolicy::Forced(s) => s,
        StatePolicy::Probabilistic(p) => {
            p.validate()?;
            draw_los_state(los_probability(&p, geom.d2d, geom.h_r), rng)
        }
    };
    let params = data.params.get(cfg.scenario, state)?;
    let lsps = draw_lsps_with(params, cfg.carrier.f_ghz(), &cfg.correlation, rng)?;
    let set = generate_clusters(params, &lsps, &mean_angles(&geom), rng)?;
    Ok((state, lsps, set))
}

/// Coefficient tensor of an existing cluster set plus per-cluster losses.
pub fn cluster_tensor(
    cfg: &LinkConfig,
    data: &ModelData,
    set: &ClusterSet,
    geom: &LinkGeometry,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let ctx = CoefficientContext::new(&cfg.tx, &cfg.rx, geom, cfg.carrier.wavelength())?;
    let n = set.len();
    let mut loss = vec![0.0; n];
    if cfg.oxygen {
        for (l, c) in loss.iter_mut().zip(&set.clusters) {
            *l += oxygen_loss(&data.oxygen, cfg.carrier.f_ghz(), geom.d3d, c.delay, 0.0)?;
        }
    }
    if !cfg.blockage.is_empty() {
        for r in &cfg.blockage {
            r.validate()?;
        }
        let dirs: Vec<ClusterDirection> = set
            .clusters
            .iter()
            .map(|c| ClusterDirection {
                aoa: c.angles.aoa.to_degrees(),
                zoa: c.angles.zoa.to_degrees(),
                aod: c.angles.aod.to_degrees(),
                zod: c.angles.zod.to_degrees(),
            })
            .collect();
        for (l, b) in loss.iter_mut().zip(blockage_attenuation(&cfg.blockage, &dirs)) {
            *l += b;
        }
    }
    let (nu, ns, nt) = (ctx.num_rx(), ctx.num_tx(), cfg.times.len());
    let mut data_out = vec![Complex64::new(0.0, 0.0); nu * ns * n * nt];
    for (ci, c) in set.clusters.iter().enumerate() {
        let h = ctx.cluster_coefficients(c, &cfg.times)?;
        let scale = 10f64.powf(-loss[ci] / 20.0);
        for u in 0..nu {
            for s in 0..ns {
                for t in 0..nt {
                    data_out[((u * ns + s) * n + ci) * nt + t] = h[(u * ns + s) * nt + t] * scale;
                }
            }
        }
    }
    Ok((data_out, loss))
}

/// Run one drop end to end. Identical (`cfg`, `seed`) give identical output.
pub fn assemble_link(cfg: &LinkConfig, data: &ModelData, seed: u64) -> Result<LinkRealization> {
    if cfg.times.is_empty() {
        return Err(Error::invalid("at least one sample time is required"));
    }
    let geom = cfg.geometry();
    let mut rng = stream(seed, 0);
    let (state, lsps, set) = draw_drop(cfg, data, &mut rng)?;
    let pathloss_db = pathloss_for(cfg, state, &geom)?;
    let (mut shadow_db, mut o2i_db) = (lsps.sf_db, 0.0);
    if state == LinkState::O2i {
        if let Some(o) = &cfg.o2i {
            let l = o2i_loss(&o.mix, cfg.carrier.f_ghz(), o.d_in, &mut rng)?;
            shadow_db += l.excess;
            o2i_db = l.pl_tw + l.pl_in;
        }
    }
    let (data_out, cluster_loss_db) = cluster_tensor(cfg, data, &set, &geom)?;
    let tensor = ChannelCoefficientTensor {
        dims: [cfg.rx.num_elements(), cfg.tx.num_elements(), set.len(), cfg.times.len()],
        data: data_out,
        delays: set.delays(),
        times: cfg.times.clone(),
        meta: TensorMeta {
            f_c: cfg.carrier.f_c(),
            seed,
            scenario: cfg.scenario,
            state,
            pathloss_db,
            shadow_db,
            o2i_db,
            cluster_loss_db,
        },
    };
    Ok(LinkRealization {
        tensor,
        clusters: set,
        lsps,
        geometry: geom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_state::{BlockTarget, LosModel};
    use crate::rng::derive_seed;

    fn base(state: LinkState, f_ghz: f64) -> LinkConfig {
        LinkConfig::new(
            ScenarioKind::Uma,
            state,
            CarrierSpec::from_ghz(f_ghz).unwrap(),
            Position3D::new(0.0, 0.0, 25.0),
            Position3D::new(120.0, 40.0, 1.5),
        )
    }

    #[test]
    fn deterministic_per_seed() {
        let data = ModelData::load().unwrap();
        let mut cfg = base(LinkState::Nlos, 3.5);
        cfg.tx = AntennaArraySpec::new(2, 2, 2);
        cfg.times = vec![0.0, 1e-3];
        cfg.velocity = Velocity::horizontal(3.0, 1.0);
        let a = assemble_link(&cfg, &data, 42).unwrap();
        let b = assemble_link(&cfg, &data, 42).unwrap();
        let c = assemble_link(&cfg, &data, 43).unwrap();
        assert_eq!(a.tensor, b.tensor);
        assert_ne!(a.tensor.data, c.tensor.data);
        assert_eq!(a.tensor.dims, [1, 8, 20, 2]);
        assert!(a.tensor.data.iter().all(|x| x.re.is_finite() && x.im.is_finite()));
    }

    #[test]
    fn wideband_power_is_unity_on_average() {
        let data = ModelData::load().unwrap();
        for state in [LinkState::Los, LinkState::Nlos] {
            let cfg = base(state, 6.0);
            let n = 10_000;
            let mean: f64 = (0..n)
                .map(|i| {
                    assemble_link(&cfg, &data, derive_seed(5, i))
                        .unwrap()
                        .tensor
                        .wideband_power(0, 0, 0)
                })
                .sum::<f64>()
                / n as f64;
            assert!((mean - 1.0).abs() < 0.01, "{state}: {mean}");
        }
    }

    #[test]
    fn oxygen_reduces_every_cluster() {
        let data = ModelData::load().unwrap();
        let mut cfg = base(LinkState::Nlos, 60.0);
        let plain = assemble_link(&cfg, &data, 9).unwrap();
        cfg.oxygen = true;
        let oxy = assemble_link(&cfg, &data, 9).unwrap();
        assert_eq!(plain.clusters, oxy.clusters);
        for n in 0..plain.tensor.dims[2] {
            let a = plain.tensor.get(0, 0, n, 0).norm_sqr();
            let b = oxy.tensor.get(0, 0, n, 0).norm_sqr();
            assert!(b < a);
        }
        assert!(oxy.tensor.meta.cluster_loss_db.iter().all(|l| *l > 0.0));
    }

    #[test]
    fn blockage_hits_matching_clusters() {
        let data = ModelData::load().unwrap();
        let mut cfg = base(LinkState::Nlos, 28.0);
        cfg.blockage = vec![BlockerRegion {
            azimuth_deg: [-180.0, 180.0],
            zenith_deg: [0.0, 180.0],
            attenuation_db: 10.0,
            applies_to: BlockTarget::Aoa,
        }];
        let r = assemble_link(&cfg, &data, 1).unwrap();
        assert!(r.tensor.meta.cluster_loss_db.iter().all(|l| *l == 10.0));
    }

    #[test]
    fn o2i_and_state_policies() {
        let data = ModelData::load().unwrap();
        let mut cfg = base(LinkState::O2i, 28.0);
        cfg.o2i = Some(O2iSettings {
            mix: MaterialMix::preset("high-loss").unwrap(),
            d_in: 10.0,
        });
        let r = assemble_link(&cfg, &data, 3).unwrap();
        assert!(r.tensor.meta.o2i_db > 30.0);
        assert_eq!(r.tensor.meta.state, LinkState::O2i);

        let mut cfg = base(LinkState::Los, 28.0);
        cfg.state = StatePolicy::Probabilistic(LosProbParams::new(LosModel::Uma3gpp));
        let states: Vec<LinkState> = (0..200)
            .map(|i| assemble_link(&cfg, &data, i).unwrap().tensor.meta.state)
            .collect();
        assert!(states.contains(&LinkState::Los) && states.contains(&LinkState::Nlos));

        let mut rma = base(LinkState::Los, 28.0);
        rma.scenario = ScenarioKind::Rma;
        assert!(assemble_link(&rma, &data, 0).unwrap_err().is_model_validity());
    }

    #[test]
    fn doppler_bounded_by_speed() {
        let data = ModelData::load().unwrap();
        let mut cfg = base(LinkState::Los, 28.0);
        cfg.velocity = Velocity::horizontal(15.0, 0.7);
        let lambda = cfg.carrier.wavelength();
        let v = cfg.velocity.to_vector();
        for seed in 0..200 {
            let r = assemble_link(&cfg, &data, seed).unwrap();
            for c in &r.clusters.clusters {
                for ray in &c.rays {
                    let nu = doppler_frequency(ray.angles.zoa, ray.angles.aoa, &v, lambda).unwrap();
                    assert!(nu.abs() <= 15.0 / lambda * (1.0 + 1e-12));
                }
            }
        }
    }
}
