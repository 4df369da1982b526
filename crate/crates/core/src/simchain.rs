//! Flat Rayleigh MIMO channel with complex AWGN.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// One use of the channel, `y = H s + n`.
#[derive(Debug, Clone)]
pub struct ChannelUse {
    pub h: CMatrix,
    pub s: Vec<Complex64>,
    pub noise: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// Circularly-symmetric complex Gaussian with `E|z|^2 = 2 * var_per_dim`.
fn complex_gaussian(rng: &mut impl Rng, std_per_dim: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_dim, im * std_per_dim)
}

/// `m_r x m_t` matrix of i.i.d. CN(0, 1) entries.
pub fn draw_channel(rng: &mut impl Rng, m_r: usize, m_t: usize) -> CMatrix {
    let std = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(m_r, m_t, |_, _| complex_gaussian(rng, std))
}

/// Noise variance per real dimension for a target Eb/N0.
///
/// Unit symbol energy, `E_b = E_s / (rate * q)`, complex noise variance
/// `2 sigma^2 = N_0`; the receive-array gain is not folded in.
pub fn ebn0_to_sigma_sq(ebn0_db: f64, rate: f64, q: usize) -> f64 {
    1.0 / (2.0 * rate * q as f64 * 10f64.powf(ebn0_db / 10.0))
}

/// What energy `E_b` in Eb/N0 refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ebn0Convention {
    /// Energy per info bit summed over the receive array: with unit-power
    /// Rayleigh gains this is `m_r` times the transmit-side value.
    Receive,
    /// Energy per info bit at the transmitter, unit symbol energy; see
    /// [`ebn0_to_sigma_sq`].
    Transmit,
}

impl Ebn0Convention {
    pub fn sigma_sq(self, ebn0_db: f64, rate: f64, q: usize, m_r: usize) -> f64 {
        let tx = ebn0_to_sigma_sq(ebn0_db, rate, q);
        match self {
            Ebn0Convention::Receive => m_r as f64 * tx,
            Ebn0Convention::Transmit => tx,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ebn0Convention::Receive => "receive",
            Ebn0Convention::Transmit => "transmit",
        }
    }

    /// One-line statement written into every results file.
    pub fn description(self) -> &'static str {
        match self {
            Ebn0Convention::Receive => {
                "receive: Eb per info bit summed over all receive antennas; unit symbol energy; rate 1/2; \
                 complex noise variance 2*sigma^2 = m_r/(rate*q*Eb/N0)"
            }
            Ebn0Convention::Transmit => {
                "transmit: Eb per info bit at the transmitter; unit symbol energy; rate 1/2; \
                 complex noise variance 2*sigma^2 = 1/(rate*q*Eb/N0); no receive-array gain"
            }
        }
    }
}

impl fmt::Display for Ebn0Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ebn0Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "receive" | "rx" => Ok(Ebn0Convention::Receive),
            "transmit" | "tx" => Ok(Ebn0Convention::Transmit),
            other => Err(Error::Config(format!("unknown Eb/N0 convention '{other}'"))),
        }
    }
}

/// `y = H s + n` with `n` i.i.d. CN(0, 2 sigma^2).
pub fn transmit(
    s: &[Complex64],
    h: &CMatrix,
    sigma_sq: f64,
    rng: &mut impl Rng,
) -> Result<ChannelUse> {
    Error::check_len(h.cols(), s.len())?;
    let std = sigma_sq.max(0.0).sqrt();
    let noise: Vec<Complex64> = (0..h.rows()).map(|_| complex_gaussian(rng, std)).collect();
    let y = h
        .mul_vec(s)
        .iter()
        .zip(&noise)
        .map(|(a, n)| a + n)
        .collect();
    Ok(ChannelUse {
        h: h.clone(),
        s: s.to_vec(),
        noise,
        y,
    })
}
