use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::SimConfig;
use crate::rng::PRNG_ID;
use crate::sphere::{Counters, Variant};
use crate::{Error, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const PLOT_FILE: &str = "plot.dat";

pub const CSV_HEADER: &str =
    "ebn0_db,iteration,variant,expanded_nodes_avg,mults_pd_avg,mults_prune_avg,mults_total_avg,ber,frames,seed";

/// Per-(Eb/N0, iteration, variant) aggregate. Averages are per channel use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub ebn0_db: f64,
    /// One-based.
    pub iteration: usize,
    pub variant: Variant,
    pub expanded_nodes_avg: f64,
    pub mults_pd_avg: f64,
    pub mults_prune_avg: f64,
    pub mults_total_avg: f64,
    pub ber: f64,
    pub frames: u64,
    pub channel_uses: u64,
    pub bit_errors: u64,
    pub info_bits: u64,
    pub totals: Counters,
    pub seed: u64,
}

impl IterationReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_sums(
        ebn0_db: f64,
        iteration: usize,
        variant: Variant,
        totals: Counters,
        channel_uses: u64,
        bit_errors: u64,
        info_bits: u64,
        frames: u64,
        seed: u64,
    ) -> Self {
        let per_use = |x: u64| x as f64 / channel_uses.max(1) as f64;
        IterationReport {
            ebn0_db,
            iteration,
            variant,
            expanded_nodes_avg: per_use(totals.expanded_nodes),
            mults_pd_avg: per_use(totals.complex_mults_pd),
            mults_prune_avg: per_use(totals.complex_mults_prune),
            mults_total_avg: per_use(totals.complex_mults_total()),
            ber: bit_errors as f64 / info_bits.max(1) as f64,
            frames,
            channel_uses,
            bit_errors,
            info_bits,
            totals,
            seed,
        }
    }
}

/// Cross-check results accumulated over a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Verification {
    pub max_variant_diff: f64,
    pub max_oracle_diff: Option<f64>,
    pub clipped_channel_uses: u64,
}

fn config_comment(cfg: &SimConfig) -> String {
    let mut out = String::new();
    writeln!(out, "# prng={PRNG_ID}").unwrap();
    writeln!(
        out,
        "# ebn0_convention_text={}",
        cfg.ebn0_convention.description()
    )
    .unwrap();
    for (k, v) in cfg.echo() {
        writeln!(out, "# {k}={v}").unwrap();
    }
    out
}

pub fn results_csv(cfg: &SimConfig, reports: &[IterationReport]) -> String {
    let mut out = config_comment(cfg);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6e},{},{}",
            r.ebn0_db,
            r.iteration,
            r.variant,
            r.expanded_nodes_avg,
            r.mults_pd_avg,
            r.mults_prune_avg,
            r.mults_total_avg,
            r.ber,
            r.frames,
            r.seed
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    prng: &'static str,
    ebn0_convention: &'static str,
    config: serde_json::Map<String, serde_json::Value>,
    verification: &'a Verification,
    reports: &'a [IterationReport],
}

pub fn summary_json(
    cfg: &SimConfig,
    reports: &[IterationReport],
    verification: &Verification,
) -> Result<String> {
    let config = cfg
        .echo()
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
        .collect();
    let summary = Summary {
        prng: PRNG_ID,
        ebn0_convention: cfg.ebn0_convention.description(),
        config,
        verification,
        reports,
    };
    serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))
}

/// Whitespace-separated table for plotting: average expanded nodes and
/// average complex multiplications per variant over the iterations.
pub fn plot_data(cfg: &SimConfig, reports: &[IterationReport]) -> String {
    let mut out = config_comment(cfg);
    out.push_str("# ebn0_db iteration nodes_t nodes_ch nodes_pr mults_t mults_ch mults_pr\n");
    let mut keys: Vec<(f64, usize)> = reports.iter().map(|r| (r.ebn0_db, r.iteration)).collect();
    keys.dedup();
    for (ebn0, it) in keys {
        let find = |v: Variant| {
            reports
                .iter()
                .find(|r| r.ebn0_db == ebn0 && r.iteration == it && r.variant == v)
        };
        let fmt = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |x| format!("{x:.6}"));
        let nodes: Vec<String> = Variant::ALL
            .iter()
            .map(|&v| fmt(find(v).map(|r| r.expanded_nodes_avg)))
            .collect();
        let mults: Vec<String> = Variant::ALL
            .iter()
            .map(|&v| fmt(find(v).map(|r| r.mults_total_avg)))
            .collect();
        writeln!(out, "{ebn0} {it} {} {}", nodes.join(" "), mults.join(" ")).unwrap();
    }
    out
}

/// Writes the results table, the JSON summary and the plot data into `dir`.
pub fn write_results(
    dir: &Path,
    cfg: &SimConfig,
    reports: &[IterationReport],
    verification: &Verification,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(path, e))
    };
    write(RESULTS_FILE, results_csv(cfg, reports))?;
    write(SUMMARY_FILE, summary_json(cfg, reports, verification)?)?;
    write(PLOT_FILE, plot_data(cfg, reports))
}
