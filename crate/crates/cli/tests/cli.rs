use std::path::Path;
use std::process::Command;

use chansim_cli::{
    parse_config_str, run_drops, run_figure_suite, run_pathloss_sweep, run_statistics, sweep_rows, with_workers,
    SweepSection,
};
use chansim_core::LinkState;

const BASE: &str = r#"
seed = 3
drops = 120
[link]
scenario = "UMi-StreetCanyon"
state = "NLOS"
f_ghz = 28.0
bs = [0.0, 0.0, 10.0]
ms = [20.0, 0.0, 1.5]
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chansim"))
}

fn write_cfg(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn sweep_covers_both_states_and_nlos_dominates() {
    let s = SweepSection {
        points: 25,
        ..SweepSection::default()
    };
    let rows = sweep_rows(&s).unwrap();
    assert_eq!(rows.len(), 25 * s.f_ghz.len() * 2);
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].state, pair[1].state), (LinkState::Los, LinkState::Nlos));
        assert!(pair[1].pl_db >= pair[0].pl_db);
    }
    let csv = run_pathloss_sweep(&s).unwrap();
    assert!(csv.starts_with("d_m,f_GHz,state,pl_db\n"));
    assert_eq!(csv.lines().count(), 1 + rows.len());
}

#[test]
fn figure_csvs_match_their_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config_str(BASE).unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    cfg.figures.o2i_draws = 4000;
    let (bundle, summary) = with_workers(Some(2), || run_figure_suite(&cfg)).unwrap().unwrap();
    assert!((summary.large_array_peak_dbi - summary.small_array_peak_dbi - 12.0).abs() < 0.5);

    // SC tracks re-checked from the emitted numbers
    let text = std::fs::read_to_string(dir.path().join("sc_tracks.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let n = rows.iter().map(|r| r[2] as usize).max().unwrap() + 1;
    for c in 0..n {
        let track: Vec<&Vec<f64>> = rows.iter().filter(|r| r[2] as usize == c).collect();
        for w in track.windows(2) {
            let bound = (w[1][1] - w[0][1]) / 0.299_792_458 * 1.1;
            assert!((w[1][3] - w[0][3]).abs() <= bound + 1e-9, "cluster {c}");
        }
    }

    // O2I means: low-loss mean rises with f; pooled stds near 4.4 / 6.5 dB
    let text = std::fs::read_to_string(dir.path().join("o2i_means.csv")).unwrap();
    let low: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.contains(",low-loss,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(low.windows(2).all(|w| w[1] > w[0]));
    let std = |name: &str| summary.o2i_excess_std_db.iter().find(|s| s.0 == name).unwrap().1;
    assert!((std("low-loss") - 4.4).abs() < 0.3);
    assert!((std("high-loss") - 6.5).abs() < 0.3);

    // manifest hashes match the files
    for a in &bundle.manifest.artifacts {
        let bytes = std::fs::read(dir.path().join(&a.file)).unwrap();
        assert_eq!(bytes.len() as u64, a.bytes);
    }
    assert_eq!(bundle.manifest.config, cfg.canonical_toml());
}

#[test]
fn run_and_stats_are_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config_str(&format!("{BASE}[features]\nsc = true\n")).unwrap();
    let mut outputs = Vec::new();
    for (w, name) in [(1, "a"), (3, "b")] {
        cfg.output_dir = dir.path().join(name);
        with_workers(Some(w), || run_drops(&cfg)).unwrap().unwrap();
        with_workers(Some(w), || run_statistics(&cfg)).unwrap().unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&cfg.output_dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    let names: Vec<&str> = outputs[0].iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "drop_tracks.csv",
            "drops.csv",
            "manifest.json",
            "sc_tracks.csv",
            "stats.csv",
            "tensor_drop0.csv"
        ]
    );
}

#[test]
fn stats_needs_100_drops_and_reports_small_runs() {
    let mut cfg = parse_config_str(BASE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    cfg.drops = 99;
    assert_eq!(run_statistics(&cfg).unwrap_err().exit_code(), 2);
    cfg.drops = 100;
    let (_, stats) = run_statistics(&cfg).unwrap();
    assert_eq!(stats.len(), 5);
    assert!(stats.iter().all(|s| s.n == 100 && s.mean_ci_high > s.mean_ci_low));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();

    let cfg = write_cfg(dir.path(), &format!("{BASE}foo = 1\n"));
    let o = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("foo"));

    let cfg = write_cfg(dir.path(), &BASE.replace("UMi-StreetCanyon", "RMa"));
    assert_eq!(code(&["run", cfg.to_str().unwrap()]), 3);

    assert_eq!(code(&["run", dir.path().join("missing.toml").to_str().unwrap()]), 4);

    let cfg = write_cfg(dir.path(), BASE);
    assert_eq!(
        code(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "9"
        ]),
        0
    );
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 9"));

    let o = bin()
        .args(["sweep-pathloss", "--points", "4", "--f-ghz", "2,100"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 4 * 2 * 2);
}
