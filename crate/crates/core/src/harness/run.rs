use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::report::{write_results, IterationReport, Verification};
use super::SimConfig;
use crate::coding::{bcjr_decode, rsc_encode, Interleaver, Trellis};
use crate::constellation::Constellation;
use crate::oracle::brute_force_llr;
use crate::prior::PriorTable;
use crate::rng::{derive_seed, rng_from_seed};
use crate::simchain::{draw_channel, transmit};
use crate::sphere::{
    qr_preprocess, sts_detect_with, Counters, DetectOptions, PreprocessedChannel, Variant,
};
use crate::{Error, Result};

/// Nominal code rate used for the Eb/N0 conversion.
pub const CODE_RATE: f64 = 0.5;

/// Frames run between two flushes of the results files.
const BATCH_FRAMES: usize = 64;

/// Largest LLR disagreement tolerated by the verification modes.
const VERIFY_TOLERANCE: f64 = 1e-9;

/// Fixed per-run state shared by all frames.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: SimConfig,
    constellation: Constellation,
    trellis: Trellis,
    interleaver: Interleaver,
    coded_len: usize,
    channel_uses: usize,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let constellation = Constellation::gray_qam(cfg.qam_order)?;
        let trellis = Trellis::rsc_5_7();
        let coded_len = 2 * (cfg.info_bits + trellis.memory());
        let bits_per_use = cfg.m_t * constellation.bits_per_symbol();
        Ok(Simulation {
            cfg: cfg.clone(),
            interleaver: Interleaver::random(coded_len, derive_seed(cfg.seed, u64::MAX)),
            constellation,
            trellis,
            coded_len,
            channel_uses: coded_len.div_ceil(bits_per_use),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Coded bits per frame, tail included, before padding.
    pub fn coded_len(&self) -> usize {
        self.coded_len
    }

    pub fn channel_uses(&self) -> usize {
        self.channel_uses
    }

    /// Dummy bits appended after the interleaved stream to fill the last
    /// channel use. They carry zero prior and never reach the decoder.
    pub fn pad_bits(&self) -> usize {
        self.channel_uses * self.bits_per_use() - self.coded_len
    }

    fn bits_per_use(&self) -> usize {
        self.cfg.m_t * self.constellation.bits_per_symbol()
    }

    fn measured_variants(&self, driver: Variant) -> Vec<Variant> {
        if self.cfg.verify_all_variants {
            Variant::ALL.to_vec()
        } else {
            vec![driver]
        }
    }
}

/// Outcome of one receiver iteration over one frame.
#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub driver: Variant,
    /// Summed counters of every measured variant.
    pub counters: Vec<(Variant, Counters)>,
    /// Hard decisions on the info bits from the decoder's a-posteriori LLRs.
    pub decoded: Vec<i8>,
    pub bit_errors: u64,
    /// Largest LLR difference between measured variants.
    pub max_variant_diff: f64,
    /// Largest LLR difference against the exhaustive detector, if checked.
    pub max_oracle_diff: Option<f64>,
    /// Channel uses with a clipped LLR.
    pub clipped: u64,
}

#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub channel_uses: usize,
    pub iterations: Vec<IterationOutcome>,
}

/// Runs the full detect-decode loop on one frame.
pub fn run_iterative_frame(
    sim: &Simulation,
    ebn0_db: f64,
    frame_index: u64,
) -> Result<FrameOutcome> {
    let cfg = &sim.cfg;
    let c = &sim.constellation;
    let q = c.bits_per_symbol();
    let bpu = sim.bits_per_use();
    let sigma_sq = cfg.ebn0_convention.sigma_sq(ebn0_db, CODE_RATE, q, cfg.m_r);
    let mut rng = rng_from_seed(derive_seed(cfg.seed, frame_index));
    let bit = |rng: &mut crate::rng::SimRng| if rng.random::<bool>() { 1i8 } else { -1 };

    let info: Vec<i8> = (0..cfg.info_bits).map(|_| bit(&mut rng)).collect();
    let coded = rsc_encode(&sim.trellis, &info);
    let mut stream = sim.interleaver.interleave(&coded)?;
    stream.extend((0..sim.pad_bits()).map(|_| bit(&mut rng)));

    let mut channels: Vec<PreprocessedChannel> = Vec::with_capacity(sim.channel_uses);
    for block in stream.chunks(bpu) {
        let s: Vec<Complex64> = c.map_bits(block)?;
        let h = draw_channel(&mut rng, cfg.m_r, cfg.m_t);
        let cu = transmit(&s, &h, sigma_sq, &mut rng)?;
        channels.push(qr_preprocess(&cu.h, &cu.y, sigma_sq)?);
    }

    let options = DetectOptions {
        llr_clip: cfg.llr_clip,
    };
    let mut prior = vec![0.0; stream.len()];
    let mut iterations = Vec::with_capacity(cfg.iterations);
    for it in 0..cfg.iterations {
        let driver = cfg.variant.variant_at(it);
        let measured = sim.measured_variants(driver);
        let mut counters = vec![Counters::default(); measured.len()];
        let mut ext = vec![0.0; stream.len()];
        let mut max_variant_diff: f64 = 0.0;
        let mut max_oracle_diff: Option<f64> = None;
        let mut clipped = 0;

        for (u, pc) in channels.iter().enumerate() {
            let range = u * bpu..(u + 1) * bpu;
            let pt = PriorTable::build_for_levels(&prior[range.clone()], c, cfg.m_t)?;
            let mut driver_llr = None;
            let mut others = Vec::new();
            for (slot, &v) in measured.iter().enumerate() {
                let det = sts_detect_with(pc, &pt, c, v, &options, None)?;
                counters[slot] += det.counters;
                if v == driver {
                    driver_llr = Some(det.llr);
                } else {
                    others.push(det.llr.llr_post);
                }
            }
            let llr = driver_llr.expect("driver is always measured");
            for post in &others {
                max_variant_diff = max_variant_diff.max(max_abs_diff(post, &llr.llr_post));
            }
            if cfg.verify_oracle {
                let oracle = brute_force_llr(pc, &pt, c)?;
                let d = max_abs_diff(&oracle.llr, &llr.llr_post);
                max_oracle_diff = Some(max_oracle_diff.unwrap_or(0.0).max(d));
            }
            clipped += u64::from(llr.clipped);
            ext[range].copy_from_slice(&llr.llr_ext);
        }

        let det_ext = sim.interleaver.deinterleave(&ext[..sim.coded_len])?;
        let sys: Vec<f64> = det_ext.iter().step_by(2).copied().collect();
        let par: Vec<f64> = det_ext.iter().skip(1).step_by(2).copied().collect();
        let dec = bcjr_decode(&sim.trellis, &sys, &par, &vec![0.0; sys.len()])?;
        let decoded: Vec<i8> = dec.info_post[..cfg.info_bits]
            .iter()
            .map(|&l| if l > 0.0 { 1 } else { -1 })
            .collect();
        let bit_errors = decoded.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
        let fed_back = sim.interleaver.interleave(&dec.ext_coded)?;
        prior[..sim.coded_len].copy_from_slice(&fed_back);

        iterations.push(IterationOutcome {
            driver,
            counters: measured.into_iter().zip(counters).collect(),
            decoded,
            bit_errors,
            max_variant_diff,
            max_oracle_diff,
            clipped,
        });
    }
    Ok(FrameOutcome {
        channel_uses: sim.channel_uses,
        iterations,
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    counters: Counters,
    channel_uses: u64,
    bit_errors: u64,
    info_bits: u64,
    frames: u64,
}

/// Commutative per-(Eb/N0, iteration, variant) sums.
#[derive(Debug, Default)]
struct Aggregate {
    cells: BTreeMap<(usize, usize, Variant), Cell>,
    verification: Verification,
}

impl Aggregate {
    fn add(&mut self, ebn0_index: usize, info_bits: usize, frame: &FrameOutcome) {
        for (it, outcome) in frame.iterations.iter().enumerate() {
            for &(v, counters) in &outcome.counters {
                let cell = self.cells.entry((ebn0_index, it, v)).or_default();
                cell.counters += counters;
                cell.channel_uses += frame.channel_uses as u64;
                cell.bit_errors += outcome.bit_errors;
                cell.info_bits += info_bits as u64;
                cell.frames += 1;
            }
            let ver = &mut self.verification;
            ver.max_variant_diff = ver.max_variant_diff.max(outcome.max_variant_diff);
            if let Some(d) = outcome.max_oracle_diff {
                ver.max_oracle_diff = Some(ver.max_oracle_diff.unwrap_or(0.0).max(d));
            }
            ver.clipped_channel_uses += outcome.clipped;
        }
    }

    fn reports(&self, cfg: &SimConfig) -> Vec<IterationReport> {
        self.cells
            .iter()
            .map(|(&(e, it, v), cell)| {
                IterationReport::from_sums(
                    cfg.ebn0_db[e],
                    it + 1,
                    v,
                    cell.counters,
                    cell.channel_uses,
                    cell.bit_errors,
                    cell.info_bits,
                    cell.frames,
                    cfg.seed,
                )
            })
            .collect()
    }
}

/// Reports of a finished experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub reports: Vec<IterationReport>,
    pub verification: Verification,
}

impl Experiment {
    pub fn report(
        &self,
        ebn0_db: f64,
        iteration: usize,
        variant: Variant,
    ) -> Option<&IterationReport> {
        self.reports
            .iter()
            .find(|r| r.ebn0_db == ebn0_db && r.iteration == iteration && r.variant == variant)
    }
}

/// Runs every frame at every Eb/N0 on `workers` threads and, when the config
/// names an output directory, writes the results files there after each
/// batch of frames. Output does not depend on `workers`.
pub fn run_experiment(cfg: &SimConfig, workers: usize) -> Result<Experiment> {
    let sim = Simulation::new(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let frames = cfg.frame_count();
    let mut agg = Aggregate::default();

    for (e, &ebn0) in cfg.ebn0_db.iter().enumerate() {
        for start in (0..frames).step_by(BATCH_FRAMES) {
            let end = (start + BATCH_FRAMES).min(frames);
            let batch: Vec<FrameOutcome> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|f| run_iterative_frame(&sim, ebn0, f as u64))
                    .collect::<Result<Vec<_>>>()
            })?;
            for frame in &batch {
                agg.add(e, cfg.info_bits, frame);
            }
            check_verification(cfg, &agg.verification)?;
            if let Some(dir) = &cfg.out {
                write_results(dir, cfg, &agg.reports(cfg), &agg.verification)?;
            }
            log::info!("Eb/N0 {ebn0} dB: {end}/{frames} frames");
        }
    }
    Ok(Experiment {
        reports: agg.reports(cfg),
        verification: agg.verification,
    })
}

fn check_verification(cfg: &SimConfig, ver: &Verification) -> Result<()> {
    if cfg.verify_all_variants && ver.max_variant_diff > VERIFY_TOLERANCE {
        return Err(Error::Verification(format!(
            "detector variants disagree by {:e}",
            ver.max_variant_diff
        )));
    }
    if let Some(d) = ver.max_oracle_diff {
        if d > VERIFY_TOLERANCE {
            return Err(Error::Verification(format!(
                "detector differs from exhaustive search by {d:e}"
            )));
        }
    }
    Ok(())
}
