mod common;

use proptest::prelude::*;
use sisosd_core::coding::Interleaver;
use sisosd_core::oracle::brute_force_llr;
use sisosd_core::sphere::pruning_metric;
use sisosd_core::{sts_detect, Complex64, Constellation, PriorTable, Variant};

fn order() -> impl Strategy<Value = usize> {
    prop_oneof![Just(4usize), Just(16usize)]
}

proptest! {
    #[test]
    fn channel_order_is_a_sorted_permutation(order in order(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let c = Constellation::gray_qam(order).unwrap();
        let b = Complex64::new(re, im);
        let seq: Vec<usize> = c.channel_order(b).collect();
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..order).collect::<Vec<_>>());
        for w in seq.windows(2) {
            prop_assert!((b - c.point(w[0])).norm_sqr() <= (b - c.point(w[1])).norm_sqr() + 1e-12);
        }
        prop_assert_eq!(seq[0], c.slice_nearest(b));
    }

    #[test]
    fn labels_round_trip(order in order(), bits in prop::collection::vec(any::<bool>(), 4)) {
        let c = Constellation::gray_qam(order).unwrap();
        let q = c.bits_per_symbol();
        let bits: Vec<i8> = bits[..q].iter().map(|&b| if b { 1 } else { -1 }).collect();
        let idx = c.index_of_label(&bits).unwrap();
        prop_assert_eq!(c.label(idx), &bits[..]);
        prop_assert_eq!(c.map_bits(&bits).unwrap()[0], c.point(idx));
        prop_assert_eq!(c.slice_nearest(c.point(idx)), idx);
    }

    #[test]
    fn prior_rows_are_normalized_costs(order in order(), llr in prop::collection::vec(-80.0f64..80.0, 8)) {
        let c = Constellation::gray_qam(order).unwrap();
        let levels = 8 / c.bits_per_symbol();
        let pt = PriorTable::build(&llr[..levels * c.bits_per_symbol()], &c).unwrap();
        for l in 0..levels {
            let row = pt.row(l);
            let mass: f64 = row.iter().map(|d| (-d).exp()).sum();
            prop_assert!((mass - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|&d| d >= 0.0));
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(pt.level_min(l), min);
            let sorted = pt.sorted(l);
            prop_assert_eq!(sorted.len(), order);
            for w in sorted.windows(2) {
                prop_assert!(row[w[0] as usize] <= row[w[1] as usize]);
            }
        }
    }

    #[test]
    fn interleaver_round_trips(len in 1usize..500, seed in any::<u64>()) {
        let ivl = Interleaver::random(len, seed);
        let v: Vec<u32> = (0..len as u32).collect();
        prop_assert_eq!(ivl.deinterleave(&ivl.interleave(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn relaxed_metrics_never_exceed_exact(
        d in 0.0f64..100.0,
        dch in 0.0f64..50.0,
        dpr in 0.0f64..50.0,
        slack_pr in 0.0f64..1.0,
        slack_ch in 0.0f64..1.0,
    ) {
        let exact = pruning_metric(Variant::Typical, d, dch, dpr, dpr * slack_pr, dch * slack_ch);
        prop_assert_eq!(exact, d + dch + dpr);
        for v in [Variant::Channel, Variant::Prior] {
            prop_assert!(pruning_metric(v, d, dch, dpr, dpr * slack_pr, dch * slack_ch) <= exact);
        }
    }

    #[test]
    fn detector_is_exact_on_random_small_systems(seed in any::<u64>(), prior in 0.0f64..10.0) {
        let inst = common::instance(&mut common::seeded(seed), 2, 16, 0.1, prior);
        let oracle = brute_force_llr(&inst.pc, &inst.pt, &inst.c).unwrap();
        for v in Variant::ALL {
            let det = sts_detect(&inst.pc, &inst.pt, &inst.c, v).unwrap();
            prop_assert!(common::max_abs_diff(&det.llr.llr_post, &oracle.llr) < 1e-9);
        }
    }
}
