//! Exhaustive reference computations.
//!
//! Everything here evaluates metrics directly from their definitions, with no
//! tree recursion or trellis recursion, so it can check the fast paths.

use std::fmt::Write as _;
use std::path::Path;

use crate::coding::{rsc_encode, Trellis};
use crate::constellation::Constellation;
use crate::prior::PriorTable;
use crate::sphere::PreprocessedChannel;
use crate::{Error, Result};

/// Largest number of candidate vectors the exhaustive LLR search accepts.
pub const MAX_CANDIDATES: u128 = 1 << 20;

/// Largest info block the exhaustive MAP decoder accepts.
pub const MAX_MAP_BLOCK: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `min_metric_neg[k] - min_metric_pos[k]`.
    pub llr: Vec<f64>,
    pub min_metric_pos: Vec<f64>,
    pub min_metric_neg: Vec<f64>,
}

/// `d(s)` of the full symbol vector `syms`, evaluated directly:
/// `(1/2 sigma^2) sum_i |y'_i - sum_{j >= i} R_ij s_j|^2 - sum_i ln P[s_i]`.
pub fn path_metric(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
    syms: &[usize],
) -> f64 {
    let m_t = pc.m_t();
    let r = pc.r();
    let mut channel = 0.0;
    for i in 0..m_t {
        let mut e = pc.q_h_y()[i];
        for j in i..m_t {
            e -= r[(i, j)] * c.point(syms[j]);
        }
        channel += e.norm_sqr();
    }
    let prior: f64 = syms.iter().enumerate().map(|(i, &m)| pt.row(i)[m]).sum();
    channel * pc.inv_two_sigma_sq() + prior
}

/// Max-log LLRs by enumerating every symbol vector.
pub fn brute_force_llr(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
) -> Result<OracleResult> {
    let m_t = pc.m_t();
    Error::check_len(m_t, pt.levels())?;
    let order = c.order();
    let total = (order as u128).checked_pow(m_t as u32).unwrap_or(u128::MAX);
    if total > MAX_CANDIDATES {
        return Err(Error::OracleTooLarge(total));
    }
    let q = c.bits_per_symbol();
    let nb = m_t * q;
    let mut min_pos = vec![f64::INFINITY; nb];
    let mut min_neg = vec![f64::INFINITY; nb];
    let mut syms = vec![0usize; m_t];
    for mut code in 0..total as usize {
        for s in syms.iter_mut() {
            *s = code % order;
            code /= order;
        }
        let d = path_metric(pc, pt, c, &syms);
        for (i, &m) in syms.iter().enumerate() {
            for (b, &bit) in c.label(m).iter().enumerate() {
                let slot = if bit > 0 {
                    &mut min_pos[i * q + b]
                } else {
                    &mut min_neg[i * q + b]
                };
                if d < *slot {
                    *slot = d;
                }
            }
        }
    }
    let llr = min_pos.iter().zip(&min_neg).map(|(p, n)| n - p).collect();
    Ok(OracleResult {
        llr,
        min_metric_pos: min_pos,
        min_metric_neg: min_neg,
    })
}

/// Bitwise MAP LLRs of a terminated code block by summing over all codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct MapBits {
    /// A-posteriori LLRs of every trellis input (tail included).
    pub info_post: Vec<f64>,
    /// A-posteriori LLRs of the coded bits in `(systematic, parity)` order.
    pub coded_post: Vec<f64>,
}

/// Exhaustive MAP decoding. Inputs are per trellis step, tail included, so
/// the free info block is `llr_sys.len() - memory` bits.
pub fn brute_force_map_bits(
    trellis: &Trellis,
    llr_sys: &[f64],
    llr_par: &[f64],
    llr_apriori: &[f64],
) -> Result<MapBits> {
    let n = llr_sys.len();
    Error::check_len(n, llr_par.len())?;
    Error::check_len(n, llr_apriori.len())?;
    let k = n
        .checked_sub(trellis.memory())
        .ok_or(Error::LengthMismatch {
            expected: trellis.memory(),
            actual: n,
        })?;
    if k > MAX_MAP_BLOCK {
        return Err(Error::OracleTooLarge(1u128 << k));
    }
    let mut codewords = Vec::with_capacity(1 << k);
    let mut weights = Vec::with_capacity(1 << k);
    for word in 0..1usize << k {
        let info: Vec<i8> = (0..k)
            .map(|b| if (word >> b) & 1 == 1 { 1 } else { -1 })
            .collect();
        let coded = rsc_encode(trellis, &info);
        // log P(codeword) up to a constant: sum of x * L / 2.
        let w: f64 = (0..n)
            .map(|t| {
                0.5 * (coded[2 * t] as f64 * (llr_sys[t] + llr_apriori[t])
                    + coded[2 * t + 1] as f64 * llr_par[t])
            })
            .sum();
        codewords.push(coded);
        weights.push(w);
    }
    let wmax = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let llr_of = |bit: usize| {
        let (mut plus, mut minus) = (0.0, 0.0);
        for (cw, &w) in codewords.iter().zip(&weights) {
            let p = (w - wmax).exp();
            if cw[bit] > 0 {
                plus += p;
            } else {
                minus += p;
            }
        }
        plus.ln() - minus.ln()
    };
    let coded_post: Vec<f64> = (0..2 * n).map(llr_of).collect();
    let info_post = coded_post.iter().step_by(2).copied().collect();
    Ok(MapBits {
        info_post,
        coded_post,
    })
}

/// Plain-text golden LLR file: a `#` header line with the generating seed,
/// dimensions and noise variance, then one value per line with 17
/// significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    pub seed: u64,
    pub m_t: usize,
    pub m_r: usize,
    pub order: usize,
    pub sigma_sq: f64,
    pub llr: Vec<f64>,
}

impl Golden {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# seed={} m_t={} m_r={} order={} sigma_sq={:.17e}\n",
            self.seed, self.m_t, self.m_r, self.order, self.sigma_sq
        );
        for l in &self.llr {
            writeln!(out, "{l:.16e}").expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("golden file: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let header = header
            .strip_prefix("# ")
            .ok_or_else(|| bad("missing header"))?;
        let field = |name: &str| -> Result<&str> {
            header
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(name).and_then(|v| v.strip_prefix('=')))
                .ok_or_else(|| bad(&format!("missing {name}")))
        };
        let num = |name: &str| -> Result<usize> { field(name)?.parse().map_err(|_| bad(name)) };
        let llr = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<f64>().map_err(|_| bad("bad value")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Golden {
            seed: field("seed")?.parse().map_err(|_| bad("seed"))?,
            m_t: num("m_t")?,
            m_r: num("m_r")?,
            order: num("order")?,
            sigma_sq: field("sigma_sq")?.parse().map_err(|_| bad("sigma_sq"))?,
            llr,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}
