//! Per-level symbol prior costs built from a-priori bit LLRs.
//!
//! LLRs follow `L(c) = ln(P[c = +1] / P[c = -1])`. The cost of symbol `m` at
//! level `i` is `-ln P[s_i = m]`, the sum of the exact per-bit costs
//! `ln(1 + exp(-c * L))` over the symbol's label bits `c`.

use crate::constellation::Constellation;
use crate::{Error, Result};

/// Input LLRs are clamped to this magnitude before use.
pub const LLR_CLAMP: f64 = 50.0;

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Prior costs for one detector call.
#[derive(Debug, Clone)]
pub struct PriorTable {
    levels: usize,
    order: usize,
    llr_a: Vec<f64>,
    delta: Vec<f64>,
    level_min: Vec<f64>,
    sorted_idx: Vec<u16>,
}

impl PriorTable {
    /// Builds the table for `llr_a.len() / Q` tree levels.
    pub fn build(llr_a: &[f64], c: &Constellation) -> Result<Self> {
        let q = c.bits_per_symbol();
        if llr_a.is_empty() || !llr_a.len().is_multiple_of(q) {
            return Err(Error::LengthMismatch {
                expected: llr_a.len().div_ceil(q).max(1) * q,
                actual: llr_a.len(),
            });
        }
        Self::build_for_levels(llr_a, c, llr_a.len() / q)
    }

    /// Builds the table and checks it spans exactly `levels` tree levels.
    pub fn build_for_levels(llr_a: &[f64], c: &Constellation, levels: usize) -> Result<Self> {
        let q = c.bits_per_symbol();
        let order = c.order();
        Error::check_len(levels * q, llr_a.len())?;
        let llr_a: Vec<f64> = llr_a
            .iter()
            .map(|l| l.clamp(-LLR_CLAMP, LLR_CLAMP))
            .collect();

        let mut delta = Vec::with_capacity(levels * order);
        let mut level_min = Vec::with_capacity(levels);
        let mut sorted_idx = Vec::with_capacity(levels * order);
        for block in llr_a.chunks(q) {
            // Cost of each bit being +1 / -1.
            let plus: Vec<f64> = block.iter().map(|&l| softplus(-l)).collect();
            let minus: Vec<f64> = block.iter().map(|&l| softplus(l)).collect();
            let row_start = delta.len();
            for m in 0..order {
                let cost = c
                    .label(m)
                    .iter()
                    .enumerate()
                    .map(|(b, &bit)| if bit > 0 { plus[b] } else { minus[b] })
                    .sum::<f64>();
                delta.push(cost);
            }
            let row = &delta[row_start..];
            let mut idx: Vec<u16> = (0..order as u16).collect();
            idx.sort_by(|&a, &b| row[a as usize].total_cmp(&row[b as usize]).then(a.cmp(&b)));
            level_min.push(row[idx[0] as usize]);
            sorted_idx.extend(idx);
        }
        Ok(PriorTable {
            levels,
            order,
            llr_a,
            delta,
            level_min,
            sorted_idx,
        })
    }

    /// Uniform priors (all-zero LLRs).
    pub fn uniform(levels: usize, c: &Constellation) -> Self {
        Self::build_for_levels(&vec![0.0; levels * c.bits_per_symbol()], c, levels)
            .expect("length is consistent by construction")
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The clamped a-priori LLRs the table was built from.
    pub fn llr_a(&self) -> &[f64] {
        &self.llr_a
    }

    /// Checked lookup of `-ln P[s_level = sym]`.
    pub fn symbol_prior(&self, level: usize, sym: usize) -> Result<f64> {
        if level >= self.levels {
            return Err(Error::OutOfRange {
                what: "level",
                index: level,
                size: self.levels,
            });
        }
        if sym >= self.order {
            return Err(Error::OutOfRange {
                what: "symbol",
                index: sym,
                size: self.order,
            });
        }
        Ok(self.delta(level, sym))
    }

    #[inline]
    pub fn delta(&self, level: usize, sym: usize) -> f64 {
        self.delta[level * self.order + sym]
    }

    pub fn row(&self, level: usize) -> &[f64] {
        &self.delta[level * self.order..(level + 1) * self.order]
    }

    #[inline]
    pub fn level_min(&self, level: usize) -> f64 {
        self.level_min[level]
    }

    /// Point indices of `level` in ascending prior cost.
    #[inline]
    pub fn sorted(&self, level: usize) -> &[u16] {
        &self.sorted_idx[level * self.order..(level + 1) * self.order]
    }
}
