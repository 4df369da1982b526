//! Max-log LLRs from `2 * M_T * Q` separate hard-output searches.
//!
//! Each search pins one bit to one value and finds the smallest metric among
//! the vectors satisfying the pin with a plain depth-first sphere search
//! (sorted children, radius shrunk to the best leaf). It shares nothing with
//! the single tree search beyond the channel and prior tables.

use num_complex::Complex64;

use super::{LlrFrame, PreprocessedChannel};
use crate::constellation::Constellation;
use crate::prior::PriorTable;
use crate::{Error, Result};

pub fn repeated_sd_detect(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
) -> Result<LlrFrame> {
    Error::check_len(pc.m_t(), pt.levels())?;
    Error::check_len(c.order(), pt.order())?;
    let nb = pc.m_t() * c.bits_per_symbol();
    let mut min_pos = vec![0.0; nb];
    let mut min_neg = vec![0.0; nb];
    for k in 0..nb {
        min_pos[k] = constrained_search(pc, pt, c, k, 1);
        min_neg[k] = constrained_search(pc, pt, c, k, -1);
    }
    Ok(LlrFrame::from_minima(pt.llr_a(), &min_pos, &min_neg, None))
}

struct Pinned<'a> {
    pc: &'a PreprocessedChannel,
    pt: &'a PriorTable,
    c: &'a Constellation,
    level: usize,
    bit: usize,
    value: i8,
    s: Vec<Complex64>,
    radius: f64,
}

fn constrained_search(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
    k: usize,
    value: i8,
) -> f64 {
    let q = c.bits_per_symbol();
    let mut search = Pinned {
        pc,
        pt,
        c,
        level: k / q,
        bit: k % q,
        value,
        s: vec![Complex64::new(0.0, 0.0); pc.m_t()],
        radius: f64::INFINITY,
    };
    search.descend(pc.m_t() - 1, 0.0);
    search.radius
}

impl Pinned<'_> {
    fn descend(&mut self, level: usize, d_parent: f64) {
        let residual = self.pc.residual(level, &self.s);
        let mut children: Vec<(f64, usize)> = (0..self.c.order())
            .filter(|&m| level != self.level || self.c.label(m)[self.bit] == self.value)
            .map(|m| {
                let d = d_parent
                    + self.pc.delta_channel(level, residual, self.c.point(m))
                    + self.pt.delta(level, m);
                (d, m)
            })
            .collect();
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (d, m) in children {
            if d >= self.radius {
                break;
            }
            if level == 0 {
                self.radius = d;
            } else {
                self.s[level] = self.c.point(m);
                self.descend(level - 1, d);
            }
        }
    }
}
