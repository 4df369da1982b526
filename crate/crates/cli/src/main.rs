//! `sisosd`: iterative MIMO detection-decoding simulation driver.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use sisosd_core::harness::{run_experiment, SimConfig, VariantSchedule, RESULTS_FILE};
use sisosd_core::simchain::Ebn0Convention;

#[derive(Debug, Parser)]
#[command(
    name = "sisosd",
    version,
    about = "Soft-input soft-output sphere decoding simulation"
)]
struct Cli {
    /// Flat TOML config; omitted keys take the reference defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Eb/N0 points in dB (comma separated or repeated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Vec<f64>,

    /// `receive` (Eb summed over the receive array) or `transmit`.
    #[arg(long)]
    ebn0_convention: Option<String>,

    #[arg(long)]
    iterations: Option<usize>,

    /// `t`, `ch`, `pr`, or `schedule:<v1>,<v2>,...` with one entry per iteration.
    #[arg(long)]
    variant: Option<String>,

    #[arg(long)]
    frames: Option<usize>,

    /// Info bits per frame.
    #[arg(long)]
    info_bits: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for results.csv, summary.json and plot.dat.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Cross-check every channel use against exhaustive search (small systems only).
    #[arg(long)]
    verify_oracle: bool,

    /// Run all three detector variants per channel use and report each.
    #[arg(long)]
    verify_all_variants: bool,

    /// Worker threads (0 = all cores). Does not affect results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn build_config(cli: &Cli) -> Result<SimConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    if !cli.ebn0.is_empty() {
        cfg.ebn0_db = cli.ebn0.clone();
    }
    if let Some(conv) = &cli.ebn0_convention {
        cfg.ebn0_convention = conv.parse::<Ebn0Convention>()?;
    }
    if let Some(it) = cli.iterations {
        cfg.iterations = it;
    }
    if let Some(v) = &cli.variant {
        cfg.variant = v.parse::<VariantSchedule>()?;
    }
    if let Some(f) = cli.frames {
        cfg.frames = f;
        cfg.target_info_bits = None;
    }
    if let Some(k) = cli.info_bits {
        cfg.info_bits = k;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.verify_oracle |= cli.verify_oracle;
    cfg.verify_all_variants |= cli.verify_all_variants;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let cfg = build_config(&cli).context("invalid configuration")?;
    let workers = if cli.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cli.workers
    };

    let experiment = run_experiment(&cfg, workers)?;

    println!(
        "{:>7} {:>4} {:>3} {:>12} {:>12} {:>12} {:>12}",
        "ebn0_db", "iter", "var", "nodes", "mults_pd", "mults_prune", "ber"
    );
    for r in &experiment.reports {
        println!(
            "{:>7} {:>4} {:>3} {:>12.3} {:>12.3} {:>12.3} {:>12.3e}",
            r.ebn0_db,
            r.iteration,
            r.variant,
            r.expanded_nodes_avg,
            r.mults_pd_avg,
            r.mults_prune_avg,
            r.ber
        );
    }
    if let Some(dir) = &cfg.out {
        log::info!("results written to {}", dir.join(RESULTS_FILE).display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_on_top_of_defaults() {
        let cli = Cli::parse_from([
            "sisosd",
            "--ebn0",
            "6,8",
            "--iterations",
            "2",
            "--variant",
            "schedule:ch,pr",
            "--frames",
            "3",
            "--seed",
            "11",
            "--ebn0-convention",
            "transmit",
        ]);
        let cfg = build_config(&cli).unwrap();
        assert_eq!(cfg.ebn0_db, vec![6.0, 8.0]);
        assert_eq!(cfg.frame_count(), 3);
        assert_eq!(cfg.variant.to_string(), "schedule:ch,pr");
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.ebn0_convention, Ebn0Convention::Transmit);
    }

    #[test]
    fn bad_schedule_is_rejected() {
        let cli = Cli::parse_from(["sisosd", "--iterations", "3", "--variant", "schedule:ch,pr"]);
        assert!(build_config(&cli).is_err());
    }
}
