#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use chansim_cli::{
    parse_config, run_drops, run_figure_suite, run_pathloss_sweep, run_statistics, with_workers, CliError, RunConfig,
    SweepSection,
};
use clap::{Args, Parser, Subcommand};

/// Seedable radio channel simulator.
#[derive(Debug, Parser)]
#[command(name = "chansim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML run configuration.
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo drops of the cluster channel.
    Run(RunArgs),
    /// 5G UMa LOS/NLOS pathloss over distance and frequency, as CSV.
    SweepPathloss {
        #[arg(long, default_value_t = 10.0)]
        d_min: f64,
        #[arg(long, default_value_t = 4500.0)]
        d_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Comma-separated carrier frequencies, GHz.
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 6.0, 28.0, 60.0, 100.0])]
        f_ghz: Vec<f64>,
        #[arg(long, default_value_t = 25.0)]
        h_bs: f64,
        #[arg(long, default_value_t = 1.5)]
        h_ms: f64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot-ready CSVs for the pathloss, array, O2I and mobility figures.
    Figures(RunArgs),
    /// Large-scale parameter statistics against the table targets.
    Stats(RunArgs),
}

fn load(a: &RunArgs) -> chansim_cli::Result<RunConfig> {
    let mut cfg = parse_config(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> chansim_cli::Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = load(&a)?;
            let (b, _) = with_workers(a.workers, || run_drops(&cfg))??;
            println!("{} drops written to {}", cfg.drops, b.dir.display());
        }
        Command::Figures(a) => {
            let cfg = load(&a)?;
            let (b, s) = with_workers(a.workers, || run_figure_suite(&cfg))??;
            println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
            println!("figures written to {}", b.dir.display());
        }
        Command::Stats(a) => {
            let cfg = load(&a)?;
            let (b, stats) = with_workers(a.workers, || run_statistics(&cfg))??;
            for s in &stats {
                println!(
                    "{:<5} {:<11} n={:<6} mean={:.4} (target {:.4}) {}  std={:.4} (target {:.4}) {}",
                    s.state.name(),
                    s.parameter,
                    s.n,
                    s.mean,
                    s.target_mu,
                    if s.mean_pass { "ok" } else { "off" },
                    s.std,
                    s.target_sigma,
                    if s.std_pass { "ok" } else { "off" }
                );
            }
            println!("stats written to {}", b.dir.display());
        }
        Command::SweepPathloss {
            d_min,
            d_max,
            points,
            f_ghz,
            h_bs,
            h_ms,
            out,
        } => {
            let s = SweepSection {
                d_min_m: d_min,
                d_max_m: d_max,
                points,
                f_ghz,
                h_bs_m: h_bs,
                h_ms_m: h_ms,
            };
            if points == 0 || !(d_min > 0.0 && d_max >= d_min) {
                return Err(CliError::Config("need points >= 1 and 0 < d-min <= d-max".into()));
            }
            let csv = run_pathloss_sweep(&s)?;
            match out {
                Some(p) => std::fs::write(&p, csv).map_err(|e| CliError::Io { path: p, source: e })?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chansim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
