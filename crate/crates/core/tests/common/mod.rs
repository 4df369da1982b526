#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use sisosd_core::rng::{rng_from_seed, SimRng};
use sisosd_core::simchain::{draw_channel, transmit};
use sisosd_core::{qr_preprocess, Constellation, PreprocessedChannel, PriorTable};

/// A detection problem: preprocessed channel, prior table and constellation.
pub struct Instance {
    pub pc: PreprocessedChannel,
    pub pt: PriorTable,
    pub c: Constellation,
    pub sent: Vec<usize>,
}

/// Rayleigh `m_t x m_t` channel, random symbols, AWGN of variance
/// `sigma_sq` per dimension and a-priori LLRs drawn as `N(0, prior_std^2)`.
pub fn instance(
    rng: &mut SimRng,
    m_t: usize,
    order: usize,
    sigma_sq: f64,
    prior_std: f64,
) -> Instance {
    let c = Constellation::gray_qam(order).unwrap();
    let sent: Vec<usize> = (0..m_t).map(|_| rng.random_range(0..order)).collect();
    let s: Vec<_> = sent.iter().map(|&m| c.point(m)).collect();
    let h = draw_channel(rng, m_t, m_t);
    let cu = transmit(&s, &h, sigma_sq, rng).unwrap();
    let llr: Vec<f64> = (0..m_t * c.bits_per_symbol())
        .map(|_| prior_std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let pc = qr_preprocess(&cu.h, &cu.y, sigma_sq).unwrap();
    let pt = PriorTable::build(&llr, &c).unwrap();
    Instance { pc, pt, c, sent }
}

pub fn seeded(seed: u64) -> SimRng {
    rng_from_seed(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
