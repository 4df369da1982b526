//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Criteria 3 to 5 share one full-chain run.

mod common;

use std::time::Instant;

use common::{instance, max_abs_diff, seeded};
use rand::Rng;
use sisosd_core::coding::{bcjr_decode, Trellis};
use sisosd_core::harness::{
    run_experiment, Experiment, SimConfig, PLOT_FILE, RESULTS_FILE, SUMMARY_FILE,
};
use sisosd_core::oracle::{brute_force_llr, brute_force_map_bits};
use sisosd_core::sphere::pruning_metric;
use sisosd_core::{repeated_sd_detect, sts_detect, Complex64, Constellation, PriorTable, Variant};

const EBN0_DB: f64 = 8.0;
const CHAIN_FRAMES: usize = 218;
const CHAIN_INFO_BITS: usize = 9216;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn exact_llrs() -> Outcome {
    let mut rng = seeded(1001);
    let mut worst: f64 = 0.0;
    for n in 0..100 {
        let inst = instance(
            &mut rng,
            4,
            16,
            [0.02, 0.05, 0.15][n % 3],
            [0.0, 1.0, 4.0, 20.0][n % 4],
        );
        let oracle = brute_force_llr(&inst.pc, &inst.pt, &inst.c).unwrap();
        for v in Variant::ALL {
            let det = sts_detect(&inst.pc, &inst.pt, &inst.c, v).unwrap();
            worst = worst.max(max_abs_diff(&det.llr.llr_post, &oracle.llr));
        }
    }
    outcome(
        worst < 1e-9,
        format!("100 4x4 16-QAM instances x 3 variants, max |diff| = {worst:.3e} (< 1e-9)"),
    )
}

fn dominance_fuzz() -> Outcome {
    let c = Constellation::gray_qam(16).unwrap();
    let mut rng = seeded(1002);
    let samples = 1_000_000;
    let mut violations = 0u64;
    let mut uniform_mismatch = 0u64;
    let uniform = PriorTable::uniform(1, &c);
    let mut pt = uniform.clone();
    for n in 0..samples {
        if n % 64 == 0 {
            let scale = rng.random_range(0.0..20.0);
            let llr: Vec<f64> = (0..4)
                .map(|_| scale * rng.random_range(-1.0..1.0))
                .collect();
            pt = PriorTable::build(&llr, &c).unwrap();
        }
        let r_ll: f64 = rng.random_range(0.05..3.0);
        let residual = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let scale = rng.random_range(0.5..50.0);
        let dch = |m: usize| scale * (residual - r_ll * c.point(m)).norm_sqr();
        let slice_dch = dch(c.slice_nearest(residual / r_ll));
        let d_parent = rng.random_range(0.0..100.0);
        let m = rng.random_range(0..16);
        let exact = d_parent + dch(m) + pt.delta(0, m);
        let pm = |v: Variant, table: &PriorTable| {
            pruning_metric(
                v,
                d_parent,
                dch(m),
                table.delta(0, m),
                table.level_min(0),
                slice_dch,
            )
        };
        let (t, ch, pr) = (
            pm(Variant::Typical, &pt),
            pm(Variant::Channel, &pt),
            pm(Variant::Prior, &pt),
        );
        if t != exact || ch > t || pr > t {
            violations += 1;
        }
        let (t_u, ch_u) = (
            pm(Variant::Typical, &uniform),
            pm(Variant::Channel, &uniform),
        );
        if t_u != ch_u {
            uniform_mismatch += 1;
        }
    }
    outcome(
        violations == 0 && uniform_mismatch == 0,
        format!("{samples} samples: {violations} dominance violations, {uniform_mismatch} Ch != T under uniform priors"),
    )
}

fn chain_config() -> SimConfig {
    SimConfig {
        ebn0_db: vec![EBN0_DB],
        iterations: 6,
        variant: "t".parse().unwrap(),
        info_bits: CHAIN_INFO_BITS,
        frames: CHAIN_FRAMES,
        seed: 20240601,
        verify_all_variants: true,
        out: Some(std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_chain")),
        ..SimConfig::default()
    }
}

fn mults(exp: &Experiment, it: usize, v: Variant) -> f64 {
    exp.report(EBN0_DB, it, v).unwrap().mults_total_avg
}

fn nodes(exp: &Experiment, it: usize, v: Variant) -> f64 {
    exp.report(EBN0_DB, it, v).unwrap().expanded_nodes_avg
}

fn node_ordering(exp: &Experiment) -> Outcome {
    let r = exp.report(EBN0_DB, 2, Variant::Typical).unwrap();
    let (t, ch, pr) = (
        nodes(exp, 2, Variant::Typical),
        nodes(exp, 2, Variant::Channel),
        nodes(exp, 2, Variant::Prior),
    );
    outcome(
        r.channel_uses >= 1000 && t <= ch && t <= pr,
        format!(
            "iteration 2, {} channel uses: nodes T {t:.2} <= Ch {ch:.2}, T <= Pr {pr:.2}",
            r.channel_uses
        ),
    )
}

fn savings(exp: &Experiment) -> Outcome {
    let (t2, ch2, pr2) = (
        mults(exp, 2, Variant::Typical),
        mults(exp, 2, Variant::Channel),
        mults(exp, 2, Variant::Prior),
    );
    let (t6, ch6, pr6) = (
        mults(exp, 6, Variant::Typical),
        mults(exp, 6, Variant::Channel),
        mults(exp, 6, Variant::Prior),
    );
    let ch_saving = 1.0 - ch2 / t2;
    let pr_saving = 1.0 - pr6 / t6;
    let passed = ch_saving >= 0.20
        && pr_saving >= 0.40
        && ch2 < pr2
        && pr6 < ch6
        && exp.verification.max_variant_diff <= 1e-9;
    outcome(
        passed,
        format!(
            "Ch saves {:.1}% at it 2 (>= 20%), Pr saves {:.1}% at it 6 (>= 40%), it 2 Ch {ch2:.0} < Pr {pr2:.0}, it 6 Pr {pr6:.0} < Ch {ch6:.0}, variant LLR diff {:.1e}",
            100.0 * ch_saving,
            100.0 * pr_saving,
            exp.verification.max_variant_diff
        ),
    )
}

fn ber(exp: &Experiment) -> Outcome {
    let r = exp.report(EBN0_DB, 6, Variant::Typical).unwrap();
    outcome(
        r.info_bits >= 2_000_000 && (1e-4..=3e-3).contains(&r.ber),
        format!(
            "BER after 6 iterations {:.3e} over {} info bits ({} errors), band [1e-4, 3e-3]",
            r.ber, r.info_bits, r.bit_errors
        ),
    )
}

fn bcjr_vs_map() -> Outcome {
    let t = Trellis::rsc_5_7();
    let mut rng = seeded(1006);
    let n = 12 + t.memory();
    let mut worst: f64 = 0.0;
    for b in 0..200 {
        let scale = [0.5, 2.0, 6.0, 15.0][b % 4];
        let draw = |rng: &mut sisosd_core::rng::SimRng, s: f64| -> Vec<f64> {
            (0..n).map(|_| s * rng.random_range(-1.0..1.0)).collect()
        };
        let sys = draw(&mut rng, scale);
        let par = draw(&mut rng, scale);
        let apr = draw(&mut rng, scale / 2.0);
        let dec = bcjr_decode(&t, &sys, &par, &apr).unwrap();
        let map = brute_force_map_bits(&t, &sys, &par, &apr).unwrap();
        worst = worst.max(max_abs_diff(&dec.info_post, &map.info_post));
    }
    outcome(
        worst < 1e-6,
        format!("200 random 12-bit blocks, max |diff| = {worst:.3e} (< 1e-6)"),
    )
}

fn repeated_vs_sts() -> Outcome {
    let mut rng = seeded(1007);
    let mut worst: f64 = 0.0;
    for n in 0..100 {
        let inst = instance(&mut rng, 4, 16, [0.03, 0.1][n % 2], [0.0, 3.0][n % 2]);
        let rep = repeated_sd_detect(&inst.pc, &inst.pt, &inst.c).unwrap();
        let sts = sts_detect(&inst.pc, &inst.pt, &inst.c, Variant::Typical).unwrap();
        worst = worst.max(max_abs_diff(&rep.llr_post, &sts.llr.llr_post));
    }
    outcome(
        worst < 1e-9,
        format!("100 4x4 16-QAM instances, max |diff| = {worst:.3e} (< 1e-9)"),
    )
}

fn determinism() -> Outcome {
    let base = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    let cfg = |dir: &str| SimConfig {
        info_bits: 1152,
        frames: 12,
        iterations: 3,
        variant: "schedule:t,ch,pr".parse().unwrap(),
        seed: 77,
        out: Some(base.join(dir)),
        ..SimConfig::default()
    };
    let read = |dir: &str| -> Vec<Vec<u8>> {
        [RESULTS_FILE, SUMMARY_FILE, PLOT_FILE]
            .iter()
            .map(|f| std::fs::read(base.join(dir).join(f)).unwrap())
            .collect()
    };
    run_experiment(&cfg("a"), 1).unwrap();
    run_experiment(&cfg("b"), 1).unwrap();
    run_experiment(&cfg("c"), 8).unwrap();
    let (a, b, c) = (read("a"), read("b"), read("c"));
    outcome(
        a == b && a == c,
        "results files of two 1-worker runs and one 8-worker run byte-identical".into(),
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {id}. {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            failures += 1;
        }
    };

    report(1, "max-log exactness vs exhaustive search", &mut exact_llrs);
    report(2, "pruning-metric dominance", &mut dominance_fuzz);

    let start = Instant::now();
    let chain = run_experiment(&chain_config(), workers());
    eprintln!("full chain: {:.0}s", start.elapsed().as_secs_f64());
    match chain {
        Ok(exp) => {
            report(3, "node-count ordering", &mut || node_ordering(&exp));
            report(4, "multiplication savings and crossover", &mut || {
                savings(&exp)
            });
            report(5, "BER after 6 iterations", &mut || ber(&exp));
        }
        Err(e) => {
            for (id, name) in [
                (3, "node-count ordering"),
                (4, "multiplication savings and crossover"),
                (5, "BER after 6 iterations"),
            ] {
                report(id, name, &mut || {
                    outcome(false, format!("chain run failed: {e}"))
                });
            }
        }
    }

    report(6, "log-MAP BCJR vs exhaustive MAP", &mut bcjr_vs_map);
    report(
        7,
        "repeated search vs single tree search",
        &mut repeated_vs_sts,
    );
    report(8, "determinism", &mut determinism);

    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
