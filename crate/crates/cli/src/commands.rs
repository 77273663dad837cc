use std::fmt::Write as _;

use chansim_core::antenna::{array_gain_pattern, hpbw, AngleGrid, AntennaArraySpec, Cut, GainMap, GainNormalization};
use chansim_core::gscm::{assemble_link, draw_drop, write_tensor_csv, Lsp, ModelData, StatePolicy};
use chansim_core::link_state::{o2i_loss, MaterialMix};
use chansim_core::pathloss::pl_5g_uma;
use chansim_core::rng::{derive_seed, stream, substream};
use chansim_core::scenario::Velocity;
use chansim_core::spatial::{simulate_trajectory, EvolvingClusterTrack, TrackMode};
use chansim_core::{LinkGeometry, LinkState, Position3D};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SweepSection};
use crate::output::{BundleWriter, OutputBundle};
use crate::Result;

// seed-derivation labels for the figure suite
const FIG_O2I: u64 = 2;
const FIG_TRACKS: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub d_m: f64,
    pub f_ghz: f64,
    pub state: LinkState,
    pub pl_db: f64,
}

/// 5G UMa LOS and NLOS pathloss over the sweep grid; distances are 2D.
pub fn sweep_rows(s: &SweepSection) -> Result<Vec<SweepRow>> {
    let d: Vec<f64> = if s.points == 1 {
        vec![s.d_min_m]
    } else {
        let r = (s.d_max_m / s.d_min_m).ln() / (s.points - 1) as f64;
        (0..s.points).map(|i| s.d_min_m * (r * i as f64).exp()).collect()
    };
    let mut rows = Vec::with_capacity(d.len() * s.f_ghz.len() * 2);
    for &f in &s.f_ghz {
        for &dm in &d {
            let g = LinkGeometry::new(
                Position3D::new(0.0, 0.0, s.h_bs_m),
                Position3D::new(dm, 0.0, s.h_ms_m),
                Velocity::ZERO,
            );
            let (los, nlos) = pl_5g_uma(&g, f)?;
            rows.push(SweepRow {
                d_m: dm,
                f_ghz: f,
                state: LinkState::Los,
                pl_db: los,
            });
            rows.push(SweepRow {
                d_m: dm,
                f_ghz: f,
                state: LinkState::Nlos,
                pl_db: nlos,
            });
        }
    }
    Ok(rows)
}

/// `d_m,f_GHz,state,pl_db` CSV.
pub fn run_pathloss_sweep(s: &SweepSection) -> Result<String> {
    let mut out = String::from("d_m,f_GHz,state,pl_db\n");
    for r in sweep_rows(s)? {
        writeln!(out, "{},{},{},{}", r.d_m, r.f_ghz, r.state, r.pl_db).unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropSummary {
    pub drop: usize,
    pub state: LinkState,
    pub pathloss_db: Option<f64>,
    pub shadow_db: f64,
    pub o2i_db: f64,
    pub ds_ns: f64,
    pub asd_deg: f64,
    pub asa_deg: f64,
    pub zsa_deg: f64,
    pub zsd_deg: f64,
    pub k_db: Option<f64>,
    pub clusters: usize,
    /// Σ_n |h|² on the first port pair at the first time, dB.
    pub gain_db: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Monte-Carlo drops: `drops.csv`, the first drop's coefficient tensor and,
/// with `features.sc`, SC-I and drop-based tracks.
pub fn run_drops(cfg: &RunConfig) -> Result<(OutputBundle, Vec<DropSummary>)> {
    let data = ModelData::load()?;
    let link = cfg.link_config()?;
    let mut tensor0 = Vec::new();
    let results = (0..cfg.drops)
        .into_par_iter()
        .map(|i| assemble_link(&link, &data, derive_seed(cfg.seed, i as u64)).map(|r| (i, r)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut summaries = Vec::with_capacity(results.len());
    for (i, r) in results {
        if i == 0 {
            write_tensor_csv(&r.tensor, &mut tensor0).expect("write to memory");
        }
        let l = &r.lsps;
        summaries.push(DropSummary {
            drop: i,
            state: r.tensor.meta.state,
            pathloss_db: r.tensor.meta.pathloss_db,
            shadow_db: r.tensor.meta.shadow_db,
            o2i_db: r.tensor.meta.o2i_db,
            ds_ns: l.ds() * 1e9,
            asd_deg: l.asd_deg(),
            asa_deg: l.asa_deg(),
            zsa_deg: l.zsa_deg(),
            zsd_deg: l.zsd_deg(),
            k_db: l.k_db,
            clusters: r.clusters.len(),
            gain_db: 10.0 * r.tensor.wideband_power(0, 0, 0).log10(),
        });
    }
    let mut csv = String::from(
        "drop,state,pathloss_db,shadow_db,o2i_db,ds_ns,asd_deg,asa_deg,zsa_deg,zsd_deg,k_db,clusters,gain_db\n",
    );
    for s in &summaries {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.drop,
            s.state,
            opt(s.pathloss_db),
            s.shadow_db,
            s.o2i_db,
            s.ds_ns,
            s.asd_deg,
            s.asa_deg,
            s.zsa_deg,
            s.zsd_deg,
            opt(s.k_db),
            s.clusters,
            s.gain_db
        )
        .unwrap();
    }
    let mut w = BundleWriter::new(&cfg.output_dir)?;
    w.write("drops.csv", csv.as_bytes())?;
    w.write("tensor_drop0.csv", &tensor0)?;
    if cfg.features.sc {
        let (sc, drop) = tracks(cfg, &data)?;
        w.write("sc_tracks.csv", &track_csv(&sc))?;
        w.write("drop_tracks.csv", &track_csv(&drop))?;
    }
    Ok((w.finish("run", cfg)?, summaries))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamStat {
    pub state: LinkState,
    pub parameter: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub mean_ci_low: f64,
    pub mean_ci_high: f64,
    pub target_mu: f64,
    pub target_sigma: f64,
    /// |mean − μ| ≤ 3σ/√N
    pub mean_pass: bool,
    /// |std − σ| ≤ 5 % of σ
    pub std_pass: bool,
}

const STAT_PARAMS: [(Lsp, &str); 5] = [
    (Lsp::Ds, "lg_DS_s"),
    (Lsp::Asd, "lg_ASD_deg"),
    (Lsp::Asa, "lg_ASA_deg"),
    (Lsp::Zsa, "lg_ZSA_deg"),
    (Lsp::Zsd, "lg_ZSD_deg"),
];

/// Sample log10 spreads over `cfg.drops` drops against the table targets,
/// grouped by link state. Needs at least 100 drops.
pub fn run_statistics(cfg: &RunConfig) -> Result<(OutputBundle, Vec<ParamStat>)> {
    let stats = statistics(cfg)?;
    let mut csv = String::from(
        "state,parameter,n,mean_log10,std_log10,mean_ci95_low,mean_ci95_high,target_mu_log10,target_sigma_log10,mean_pass,std_pass\n",
    );
    for s in &stats {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.state,
            s.parameter,
            s.n,
            s.mean,
            s.std,
            s.mean_ci_low,
            s.mean_ci_high,
            s.target_mu,
            s.target_sigma,
            s.mean_pass,
            s.std_pass
        )
        .unwrap();
    }
    let mut w = BundleWriter::new(&cfg.output_dir)?;
    w.write("stats.csv", csv.as_bytes())?;
    Ok((w.finish("stats", cfg)?, stats))
}

fn statistics(cfg: &RunConfig) -> Result<Vec<ParamStat>> {
    if cfg.drops < 100 {
        return Err(crate::CliError::Config(format!(
            "stats needs drops >= 100 (got {})",
            cfg.drops
        )));
    }
    let data = ModelData::load()?;
    let link = cfg.link_config()?;
    let f = cfg.link.f_ghz;
    let draws = (0..cfg.drops)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(derive_seed(cfg.seed, i as u64), 0);
            draw_drop(&link, &data, &mut rng).map(|(s, l, _)| (s, [l.lg_ds, l.lg_asd, l.lg_asa, l.lg_zsa, l.lg_zsd]))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for state in cfg.states() {
        let rows: Vec<&[f64; 5]> = draws.iter().filter(|(s, _)| *s == state).map(|(_, v)| v).collect();
        let n = rows.len();
        if n < 2 {
            continue;
        }
        let target = data.params.get(cfg.link.scenario, state)?.statistics(f)?;
        for (p, name) in STAT_PARAMS {
            let k = p as usize;
            let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n as f64;
            let std = (rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            let half = 1.96 * std / (n as f64).sqrt();
            let (mu, sigma) = (target.mu[k], target.sigma[k]);
            out.push(ParamStat {
                state,
                parameter: name.into(),
                n,
                mean,
                std,
                mean_ci_low: mean - half,
                mean_ci_high: mean + half,
                target_mu: mu,
                target_sigma: sigma,
                mean_pass: (mean - mu).abs() <= 3.0 * sigma / (n as f64).sqrt(),
                std_pass: (std - sigma).abs() <= 0.05 * sigma,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    /// UMa LOS at 100 m: PL(100 GHz) − PL(2 GHz), dB.
    pub pl_los_100m_2_to_100ghz_db: f64,
    pub large_array_peak_dbi: f64,
    pub small_array_peak_dbi: f64,
    pub large_array_hpbw_az_deg: f64,
    pub large_array_hpbw_zen_deg: f64,
    pub small_array_hpbw_az_deg: f64,
    pub small_array_hpbw_zen_deg: f64,
    /// Sample std of the excess loss per material, dB.
    pub o2i_excess_std_db: Vec<(String, f64)>,
    /// Fraction of SC-I delay steps breaking the Lipschitz bound.
    pub sc_lipschitz_violations: f64,
    /// Same for cluster 2 of the drop-based track.
    pub drop_lipschitz_violations_cluster2: f64,
}

pub(crate) const LARGE_ARRAY: (usize, usize, usize) = (8, 16, 2);
pub(crate) const SMALL_ARRAY: (usize, usize, usize) = (2, 4, 2);

fn gain_map(dims: (usize, usize, usize), step: f64) -> Result<GainMap> {
    let spec = AntennaArraySpec::new(dims.0, dims.1, dims.2);
    Ok(array_gain_pattern(
        &spec,
        (90.0, 0.0),
        &AngleGrid::full(step)?,
        GainNormalization::ArrayGain,
    )?)
}

fn map_csv(m: &GainMap) -> Vec<u8> {
    let mut v = Vec::with_capacity(m.gain_dbi.len() * 32);
    m.write_csv(&mut v).expect("write to memory");
    v
}

fn track_csv(t: &EvolvingClusterTrack) -> Vec<u8> {
    let mut v = Vec::new();
    t.write_csv(&mut v).expect("write to memory");
    v
}

/// SC-I and drop-based tracks along the configured route. A probabilistic
/// link state is replaced by NLOS so both tracks keep one cluster count.
fn tracks(cfg: &RunConfig, data: &ModelData) -> Result<(EvolvingClusterTrack, EvolvingClusterTrack)> {
    let mut link = cfg.link_config()?;
    if let StatePolicy::Probabilistic(_) = link.state {
        link.state = StatePolicy::Forced(LinkState::Nlos);
    }
    let traj = cfg.trajectory();
    let seed = derive_seed(cfg.seed, FIG_TRACKS);
    Ok((
        simulate_trajectory(&link, data, &traj, TrackMode::ScI, seed)?,
        simulate_trajectory(&link, data, &traj, TrackMode::DropBased, seed)?,
    ))
}

/// Emit the plot-data set: pathloss sweep, two array gain maps, O2I loss
/// scatter with per-frequency means, and SC-I versus drop-based tracks.
pub fn run_figure_suite(cfg: &RunConfig) -> Result<(OutputBundle, FigureSummary)> {
    let data = ModelData::load()?;
    let mut w = BundleWriter::new(&cfg.output_dir)?;
    w.write("pathloss_sweep.csv", run_pathloss_sweep(&cfg.sweep)?.as_bytes())?;

    let geom = |f: f64| -> Result<f64> {
        let g = LinkGeometry::new(
            Position3D::new(0.0, 0.0, cfg.sweep.h_bs_m),
            Position3D::new(100.0, 0.0, cfg.sweep.h_ms_m),
            Velocity::ZERO,
        );
        Ok(pl_5g_uma(&g, f)?.0)
    };
    let pl_diff = geom(100.0)? - geom(2.0)?;

    let step = cfg.figures.grid_step_deg;
    let large = gain_map(LARGE_ARRAY, step)?;
    let small = gain_map(SMALL_ARRAY, step)?;
    w.write("gain_map_8x16x2.csv", &map_csv(&large))?;
    w.write("gain_map_2x4x2.csv", &map_csv(&small))?;

    let o2i_seed = derive_seed(cfg.seed, FIG_O2I);
    let materials = ["low-loss", "high-loss"];
    let mut scatter = String::from("f_GHz,material,draw,pl_tw_db,pl_in_db,excess_db,total_db\n");
    let mut means = String::from("f_GHz,material,mean_pl_tw_db,mean_total_db,std_excess_db\n");
    let mut stds = Vec::new();
    let d_in = cfg.o2i.as_ref().map_or(0.0, |o| o.d_in_m);
    for (mi, name) in materials.iter().enumerate() {
        let mix = MaterialMix::preset(name)?;
        let mut all_excess = Vec::new();
        for (fi, &f) in cfg.figures.o2i_f_ghz.iter().enumerate() {
            let mut rng = substream(o2i_seed, mi as u64, fi as u64);
            let draws = (0..cfg.figures.o2i_draws)
                .map(|_| o2i_loss(&mix, f, d_in, &mut rng))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            for (k, l) in draws.iter().enumerate() {
                writeln!(
                    scatter,
                    "{f},{name},{k},{},{},{},{}",
                    l.pl_tw,
                    l.pl_in,
                    l.excess,
                    l.total()
                )
                .unwrap();
            }
            let n = draws.len().max(1) as f64;
            let mean_tw = draws.iter().map(|l| l.pl_tw).sum::<f64>() / n;
            let mean_total = draws.iter().map(|l| l.total()).sum::<f64>() / n;
            let ex: Vec<f64> = draws.iter().map(|l| l.excess).collect();
            writeln!(means, "{f},{name},{mean_tw},{mean_total},{}", sample_std(&ex)).unwrap();
            all_excess.extend(ex);
        }
        stds.push((name.to_string(), sample_std(&all_excess)));
    }
    w.write("o2i_scatter.csv", scatter.as_bytes())?;
    w.write("o2i_means.csv", means.as_bytes())?;

    let (sc, drop) = tracks(cfg, &data)?;
    w.write("sc_tracks.csv", &track_csv(&sc))?;
    w.write("drop_tracks.csv", &track_csv(&drop))?;

    let (_, _, large_peak) = large.peak();
    let (_, _, small_peak) = small.peak();
    let summary = FigureSummary {
        pl_los_100m_2_to_100ghz_db: pl_diff,
        large_array_peak_dbi: large_peak,
        small_array_peak_dbi: small_peak,
        large_array_hpbw_az_deg: hpbw(&large, Cut::Azimuth)?,
        large_array_hpbw_zen_deg: hpbw(&large, Cut::Zenith)?,
        small_array_hpbw_az_deg: hpbw(&small, Cut::Azimuth)?,
        small_array_hpbw_zen_deg: hpbw(&small, Cut::Zenith)?,
        o2i_excess_std_db: stds,
        sc_lipschitz_violations: sc.lipschitz_violation_fraction(None, 0.1),
        drop_lipschitz_violations_cluster2: drop.lipschitz_violation_fraction(Some(1), 0.1),
    };
    let mut js = serde_json::to_string_pretty(&summary).expect("summary serializes");
    js.push('\n');
    w.write("figures_summary.json", js.as_bytes())?;
    Ok((w.finish("figures", cfg)?, summary))
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}
