//! Gray-labeled square QAM.
//!
//! Points are indexed `ix * L + iy` where `L` is the number of amplitude
//! levels per axis and `ix`/`iy` index the real/imaginary levels in ascending
//! amplitude. Each axis carries `Q/2` Gray-coded bits (MSB first, logical 1 is
//! `+1`); the real-axis bits come first in a symbol's label. For 16-QAM the
//! per-axis map is `-3 <- (-1,-1)`, `-1 <- (-1,+1)`, `+1 <- (+1,+1)`,
//! `+3 <- (+1,-1)` before the `1/sqrt(10)` normalization.

use num_complex::Complex64;

use crate::{Error, Result};

const MAX_LEVELS: usize = 4;

/// Unit-energy Gray QAM constellation.
#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    levels: Vec<f64>,
    points: Vec<Complex64>,
    /// `order * bits_per_symbol` bipolar label bits, one row per point.
    labels: Vec<i8>,
    /// Label (as an integer, MSB first, `+1 -> 1`) to point index.
    label_to_index: Vec<usize>,
}

impl Constellation {
    /// Builds 4-QAM or 16-QAM.
    pub fn gray_qam(order: usize) -> Result<Self> {
        let per_axis: usize = match order {
            4 => 2,
            16 => 4,
            other => return Err(Error::UnsupportedOrder(other)),
        };
        let bits_per_axis = per_axis.trailing_zeros() as usize;
        let bits_per_symbol = 2 * bits_per_axis;
        let scale = (2.0 * ((per_axis * per_axis) as f64 - 1.0) / 3.0).sqrt();
        let levels: Vec<f64> = (0..per_axis)
            .map(|i| (2.0 * i as f64 - (per_axis as f64 - 1.0)) / scale)
            .collect();

        let axis_bits = |level: usize| -> Vec<i8> {
            let gray = level ^ (level >> 1);
            (0..bits_per_axis)
                .rev()
                .map(|b| if (gray >> b) & 1 == 1 { 1 } else { -1 })
                .collect()
        };

        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order * bits_per_symbol);
        let mut label_to_index = vec![usize::MAX; order];
        for ix in 0..per_axis {
            for iy in 0..per_axis {
                let index = points.len();
                points.push(Complex64::new(levels[ix], levels[iy]));
                let mut label = axis_bits(ix);
                label.extend(axis_bits(iy));
                label_to_index[label_value(&label)] = index;
                labels.extend(label);
            }
        }
        Ok(Constellation {
            order,
            bits_per_symbol,
            levels,
            points,
            labels,
            label_to_index,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Bits per symbol, `Q = log2 |S|`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Amplitude levels of one axis, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Bipolar label of point `index`.
    pub fn label(&self, index: usize) -> &[i8] {
        &self.labels[index * self.bits_per_symbol..(index + 1) * self.bits_per_symbol]
    }

    /// Point index carrying the given bipolar label.
    pub fn index_of_label(&self, label: &[i8]) -> Result<usize> {
        Error::check_len(self.bits_per_symbol, label.len())?;
        Ok(self.label_to_index[label_value(label)])
    }

    /// Maps bipolar bits onto symbols, `Q` bits per symbol.
    pub fn map_bits(&self, bits: &[i8]) -> Result<Vec<Complex64>> {
        Ok(self
            .map_bits_to_indices(bits)?
            .into_iter()
            .map(|i| self.points[i])
            .collect())
    }

    pub fn map_bits_to_indices(&self, bits: &[i8]) -> Result<Vec<usize>> {
        let q = self.bits_per_symbol;
        if !bits.len().is_multiple_of(q) {
            return Err(Error::LengthMismatch {
                expected: bits.len().div_ceil(q) * q,
                actual: bits.len(),
            });
        }
        bits.chunks(q)
            .map(|block| self.index_of_label(block))
            .collect()
    }

    fn nearest_level(&self, x: f64) -> usize {
        let n = self.levels.len();
        let spacing = self.levels[1] - self.levels[0];
        let pos = (x - self.levels[0]) / spacing;
        let mut i = ((pos - 0.5).ceil()).clamp(0.0, (n - 1) as f64) as usize;
        // Settle on the exact squared-distance winner, ties toward the smaller level.
        let dist = |k: usize| (x - self.levels[k]) * (x - self.levels[k]);
        while i + 1 < n && dist(i + 1) < dist(i) {
            i += 1;
        }
        while i > 0 && dist(i - 1) <= dist(i) {
            i -= 1;
        }
        i
    }

    /// Index of the point nearest to `b`, found by per-axis quantization.
    pub fn slice_nearest(&self, b: Complex64) -> usize {
        self.nearest_level(b.re) * self.levels.len() + self.nearest_level(b.im)
    }

    /// Incremental enumeration of all points in ascending `|b - point|^2`.
    pub fn channel_order(&self, b: Complex64) -> ChannelOrder {
        ChannelOrder::new(self, b)
    }
}

fn label_value(label: &[i8]) -> usize {
    label
        .iter()
        .fold(0, |acc, &b| (acc << 1) | usize::from(b > 0))
}

/// One axis of the Schnorr-Euchner zig-zag: level indices in ascending
/// distance from `x`, ties toward the smaller level.
#[derive(Debug, Clone, Copy)]
struct AxisOrder {
    order: [u8; MAX_LEVELS],
    dist: [f64; MAX_LEVELS],
}

impl AxisOrder {
    fn new(c: &Constellation, x: f64) -> Self {
        let n = c.levels.len();
        let mut dist = [0.0; MAX_LEVELS];
        for (d, &l) in dist.iter_mut().zip(&c.levels) {
            *d = (x - l) * (x - l);
        }
        let start = c.nearest_level(x);
        let mut order = [0u8; MAX_LEVELS];
        order[0] = start as u8;
        let (mut lo, mut hi) = (start as isize - 1, start + 1);
        for slot in order.iter_mut().take(n).skip(1) {
            let take_lo = if lo < 0 {
                false
            } else if hi >= n {
                true
            } else {
                dist[lo as usize] <= dist[hi]
            };
            if take_lo {
                *slot = lo as u8;
                lo -= 1;
            } else {
                *slot = hi as u8;
                hi += 1;
            }
        }
        AxisOrder { order, dist }
    }
}

/// Cursor over the constellation in ascending squared distance from a
/// fixed center.
///
/// The two per-axis zig-zag orders are merged lazily: row `a` of the frontier
/// holds the next unemitted imaginary rank paired with the `a`-th real rank,
/// and row `a + 1` becomes live once row `a` has emitted its first point.
/// Each step scans at most `L` rows. Ties go to the smaller point index.
#[derive(Debug, Clone)]
pub struct ChannelOrder {
    x: AxisOrder,
    y: AxisOrder,
    per_axis: usize,
    row_next: [u8; MAX_LEVELS],
    live_rows: usize,
    remaining: usize,
}

impl ChannelOrder {
    fn new(c: &Constellation, b: Complex64) -> Self {
        ChannelOrder {
            x: AxisOrder::new(c, b.re),
            y: AxisOrder::new(c, b.im),
            per_axis: c.levels.len(),
            row_next: [0; MAX_LEVELS],
            live_rows: 1,
            remaining: c.order,
        }
    }
}

impl Iterator for ChannelOrder {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        let n = self.per_axis;
        let mut best: Option<(f64, usize, usize)> = None;
        for row in 0..self.live_rows {
            let rank = self.row_next[row] as usize;
            if rank >= n {
                continue;
            }
            let ix = self.x.order[row] as usize;
            let iy = self.y.order[rank] as usize;
            let d = self.x.dist[ix] + self.y.dist[iy];
            let index = ix * n + iy;
            let better = match best {
                None => true,
                Some((bd, bi, _)) => d < bd || (d == bd && index < bi),
            };
            if better {
                best = Some((d, index, row));
            }
        }
        let (_, index, row) = best.expect("frontier holds a live row while points remain");
        if self.row_next[row] == 0 && row + 1 == self.live_rows && self.live_rows < n {
            self.live_rows += 1;
        }
        self.row_next[row] += 1;
        self.remaining -= 1;
        Some(index)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for ChannelOrder {}
