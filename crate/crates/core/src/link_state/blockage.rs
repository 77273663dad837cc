use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockTarget {
    #[serde(rename = "AOA")]
    Aoa,
    #[serde(rename = "AOD")]
    Aod,
}

/// Angular region that attenuates every cluster arriving (or departing)
/// through it. Angles in degrees; the azimuth span runs counter-clockwise
/// from `azimuth_deg[0]` to `azimuth_deg[1]` and may cross ±180.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockerRegion {
    pub azimuth_deg: [f64; 2],
    pub zenith_deg: [f64; 2],
    pub attenuation_db: f64,
    pub applies_to: BlockTarget,
}

impl BlockerRegion {
    pub fn validate(&self) -> Result<()> {
        let [z0, z1] = self.zenith_deg;
        if !(z0 < z1 && z0 >= 0.0 && z1 <= 180.0) {
            return Err(Error::invalid(format!(
                "blocker zenith span [{z0}, {z1}] is empty or outside [0, 180]"
            )));
        }
        if self.azimuth_width() <= 0.0 && self.azimuth_deg[0] == self.azimuth_deg[1] {
            return Err(Error::invalid("blocker azimuth span is empty"));
        }
        if !(self.attenuation_db >= 0.0) {
            return Err(Error::invalid("blocker attenuation must be >= 0"));
        }
        Ok(())
    }

    fn azimuth_width(&self) -> f64 {
        let w = (self.azimuth_deg[1] - self.azimuth_deg[0]).rem_euclid(360.0);
        if w == 0.0 && self.azimuth_deg[1] != self.azimuth_deg[0] {
            360.0
        } else {
            w
        }
    }

    pub fn contains(&self, azimuth_deg: f64, zenith_deg: f64) -> bool {
        let off = (azimuth_deg - self.azimuth_deg[0]).rem_euclid(360.0);
        let in_az = off <= self.azimuth_width();
        in_az && zenith_deg >= self.zenith_deg[0] && zenith_deg <= self.zenith_deg[1]
    }
}

/// Mean directions of one cluster, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClusterDirection {
    pub aoa: f64,
    pub zoa: f64,
    pub aod: f64,
    pub zod: f64,
}

/// Per-cluster blockage attenuation in dB, summed over all matching regions.
pub fn blockage_attenuation(regions: &[BlockerRegion], clusters: &[ClusterDirection]) -> Vec<f64> {
    clusters
        .iter()
        .map(|c| {
            regions
                .iter()
                .filter(|r| match r.applies_to {
                    BlockTarget::Aoa => r.contains(c.aoa, c.zoa),
                    BlockTarget::Aod => r.contains(c.aod, c.zod),
                })
                .map(|r| r.attenuation_db)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn region(az: [f64; 2], zen: [f64; 2], att: f64, t: BlockTarget) -> BlockerRegion {
        BlockerRegion {
            azimuth_deg: az,
            zenith_deg: zen,
            attenuation_db: att,
            applies_to: t,
        }
    }

    #[test]
    fn membership() {
        let c = [
            ClusterDirection {
                aoa: 10.0,
                zoa: 90.0,
                aod: 0.0,
                zod: 90.0,
            },
            ClusterDirection {
                aoa: 100.0,
                zoa: 90.0,
                aod: 0.0,
                zod: 90.0,
            },
        ];
        assert_eq!(blockage_attenuation(&[], &c), vec![0.0, 0.0]);
        let r = region([0.0, 30.0], [60.0, 120.0], 20.0, BlockTarget::Aoa);
        assert_eq!(blockage_attenuation(&[r], &c), vec![20.0, 0.0]);
        let wrap = region([170.0, -170.0], [0.0, 180.0], 5.0, BlockTarget::Aoa);
        assert!(wrap.contains(180.0, 90.0) && wrap.contains(-175.0, 90.0) && !wrap.contains(0.0, 90.0));
        let both = [r, region([-20.0, 20.0], [0.0, 180.0], 3.0, BlockTarget::Aoa)];
        assert_eq!(blockage_attenuation(&both, &c)[0], 23.0);
        assert!(region([0.0, 0.0], [0.0, 10.0], 1.0, BlockTarget::Aod)
            .validate()
            .is_err());
        assert!(region([0.0, 10.0], [20.0, 10.0], 1.0, BlockTarget::Aod)
            .validate()
            .is_err());
        assert!(r.validate().is_ok());
    }

    /// Independent check: membership via explicit unwrapped intervals.
    #[test]
    fn random_clusters_match_brute_force() {
        let mut rng = stream(2, 2);
        let mut regions = Vec::new();
        for _ in 0..6 {
            let a0: f64 = rng.random_range(-180.0..180.0);
            let w: f64 = rng.random_range(1.0..120.0);
            let z0: f64 = rng.random_range(0.0..150.0);
            let zw: f64 = rng.random_range(1.0..30.0);
            let mut a1 = a0 + w;
            if a1 > 180.0 {
                a1 -= 360.0;
            }
            let t = if rng.random::<bool>() {
                BlockTarget::Aoa
            } else {
                BlockTarget::Aod
            };
            regions.push((region([a0, a1], [z0, z0 + zw], rng.random_range(0.0..30.0), t), a0, w));
        }
        let clusters: Vec<ClusterDirection> = (0..10_000)
            .map(|_| ClusterDirection {
                aoa: rng.random_range(-180.0..180.0),
                zoa: rng.random_range(0.0..180.0),
                aod: rng.random_range(-180.0..180.0),
                zod: rng.random_range(0.0..180.0),
            })
            .collect();
        let rs: Vec<BlockerRegion> = regions.iter().map(|r| r.0).collect();
        let got = blockage_attenuation(&rs, &clusters);
        for (c, g) in clusters.iter().zip(&got) {
            let mut want = 0.0;
            for (r, a0, w) in &regions {
                let (az, zen) = match r.applies_to {
                    BlockTarget::Aoa => (c.aoa, c.zoa),
                    BlockTarget::Aod => (c.aod, c.zod),
                };
                let in_az = [az - 360.0, az, az + 360.0].iter().any(|x| *x >= *a0 && *x <= a0 + w);
                if in_az && zen >= r.zenith_deg[0] && zen <= r.zenith_deg[1] {
                    want += r.attenuation_db;
                }
            }
            assert!((g - want).abs() < 1e-9);
        }
    }
}
