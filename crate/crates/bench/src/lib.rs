//! Benchmark fixtures.

use rand::Rng;
use rand_distr::StandardNormal;
use sisosd_core::rng::rng_from_seed;
use sisosd_core::simchain::{draw_channel, transmit, Ebn0Convention};
use sisosd_core::{qr_preprocess, Constellation, PreprocessedChannel, PriorTable};

pub struct Problem {
    pub pc: PreprocessedChannel,
    pub pt: PriorTable,
    pub c: Constellation,
}

/// `count` 4x4 16-QAM detection problems at `ebn0_db` with a-priori LLRs of
/// standard deviation `prior_std` pointing at the sent bits on average.
pub fn problems(count: usize, ebn0_db: f64, prior_std: f64, seed: u64) -> Vec<Problem> {
    let mut rng = rng_from_seed(seed);
    let c = Constellation::gray_qam(16).unwrap();
    let sigma_sq = Ebn0Convention::Receive.sigma_sq(ebn0_db, 0.5, 4, 4);
    (0..count)
        .map(|_| {
            let bits: Vec<i8> = (0..16)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            let s = c.map_bits(&bits).unwrap();
            let h = draw_channel(&mut rng, 4, 4);
            let cu = transmit(&s, &h, sigma_sq, &mut rng).unwrap();
            let llr: Vec<f64> = bits
                .iter()
                .map(|&b| {
                    let z: f64 = rng.sample(StandardNormal);
                    prior_std * (0.5 * prior_std * f64::from(b) + z)
                })
                .collect();
            Problem {
                pc: qr_preprocess(&cu.h, &cu.y, sigma_sq).unwrap(),
                pt: PriorTable::build(&llr, &c).unwrap(),
                c: c.clone(),
            }
        })
        .collect()
}
