//! Single tree search.
//!
//! One depth-first traversal tracks the best leaf metric `lambda_ml` and, per
//! bit, the best metric `lambda_bar[k]` among leaves whose bit `k` differs
//! from the current best leaf. A node is checked against the largest of
//! those metrics that its subtree could still lower: `lambda_ml`, every
//! `lambda_bar[k]` of a bit not yet fixed on the path, and every
//! `lambda_bar[k]` of a fixed bit that already disagrees with the best leaf.
//!
//! Children are drawn in the variant's order, in which the variant's pruning
//! metric is non-decreasing. A child failing against its parent's radius ends
//! the enumeration, since no later sibling can pass either; a child that only
//! fails its own (smaller) radius is skipped.

use num_complex::Complex64;

use super::{Counters, LlrFrame, PreprocessedChannel, Variant};
use crate::constellation::{ChannelOrder, Constellation};
use crate::prior::PriorTable;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct DetectOptions {
    /// Clamp output LLRs to this magnitude. Off by default; with an infinite
    /// initial radius both hypothesis sets are always reached.
    pub llr_clip: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub llr: LlrFrame,
    pub counters: Counters,
}

/// Instrumentation record of a traced detection.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    /// Children enumeration of node `node` initialized; children live at
    /// `level`.
    Expand { node: usize, level: usize },
    /// A child drawn from the enumeration of `parent`, before any check.
    Candidate {
        parent: usize,
        level: usize,
        sym: usize,
        pruning_metric: f64,
    },
    /// A child that passed its constraint check. `path[j]` is the symbol at
    /// level `level + j`.
    Visit {
        parent: usize,
        level: usize,
        path: Vec<usize>,
        pruning_metric: f64,
        pd: f64,
    },
    /// Leaf reached; the metrics are the values after the update.
    Leaf {
        syms: Vec<usize>,
        metric: f64,
        lambda_ml: f64,
        lambda_bar: Vec<f64>,
    },
}

/// Exact max-log LLRs by single tree search.
pub fn sts_detect(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
    variant: Variant,
) -> Result<Detection> {
    sts_detect_with(pc, pt, c, variant, &DetectOptions::default(), None)
}

/// [`sts_detect`] with options and an optional trace sink.
pub fn sts_detect_with(
    pc: &PreprocessedChannel,
    pt: &PriorTable,
    c: &Constellation,
    variant: Variant,
    options: &DetectOptions,
    trace: Option<&mut Vec<TraceEvent>>,
) -> Result<Detection> {
    Error::check_len(pc.m_t(), pt.levels())?;
    Error::check_len(c.order(), pt.order())?;
    let mut search = Search::new(pc, pt, c, variant, trace);
    search.run();
    Ok(search.finish(options))
}

struct LevelState {
    node: usize,
    residual: Complex64,
    d_parent: f64,
    /// (pruning metric, channel distance, symbol), sorted, for `Typical`.
    fes: Vec<(f64, f64, usize)>,
    cursor: Option<ChannelOrder>,
    slice: usize,
    slice_dch: f64,
    pos: usize,
}

struct Search<'a, 't> {
    pc: &'a PreprocessedChannel,
    pt: &'a PriorTable,
    c: &'a Constellation,
    variant: Variant,
    m_t: usize,
    q: usize,
    levels: Vec<LevelState>,
    s: Vec<Complex64>,
    syms: Vec<usize>,
    labels: Vec<i8>,
    lambda_ml: f64,
    ml_labels: Vec<i8>,
    lambda_bar: Vec<f64>,
    counters: Counters,
    next_node: usize,
    trace: Option<&'t mut Vec<TraceEvent>>,
}

impl<'a, 't> Search<'a, 't> {
    fn new(
        pc: &'a PreprocessedChannel,
        pt: &'a PriorTable,
        c: &'a Constellation,
        variant: Variant,
        trace: Option<&'t mut Vec<TraceEvent>>,
    ) -> Self {
        let m_t = pc.m_t();
        let q = c.bits_per_symbol();
        let levels = (0..m_t)
            .map(|_| LevelState {
                node: 0,
                residual: Complex64::new(0.0, 0.0),
                d_parent: 0.0,
                fes: Vec::with_capacity(if variant == Variant::Typical {
                    c.order()
                } else {
                    0
                }),
                cursor: None,
                slice: 0,
                slice_dch: 0.0,
                pos: 0,
            })
            .collect();
        let mut counters = Counters::default();
        match variant {
            Variant::Typical => {}
            Variant::Channel => counters.min_ops += m_t as u64,
            Variant::Prior => counters.sorts_full += m_t as u64,
        }
        Search {
            pc,
            pt,
            c,
            variant,
            m_t,
            q,
            levels,
            s: vec![Complex64::new(0.0, 0.0); m_t],
            syms: vec![0; m_t],
            labels: vec![0; m_t * q],
            lambda_ml: f64::INFINITY,
            ml_labels: vec![0; m_t * q],
            lambda_bar: vec![f64::INFINITY; m_t * q],
            counters,
            next_node: 0,
            trace,
        }
    }

    fn run(&mut self) {
        let top = self.m_t - 1;
        self.expand(top, 0.0);
        let mut l = top;
        loop {
            let Some((sym, pm, known_dch)) = self.next_candidate(l) else {
                if l == top {
                    break;
                }
                l += 1;
                continue;
            };
            if let Some(trace) = self.trace.as_deref_mut() {
                trace.push(TraceEvent::Candidate {
                    parent: self.levels[l].node,
                    level: l,
                    sym,
                    pruning_metric: pm,
                });
            }
            if pm >= self.radius(l + 1) {
                if l == top {
                    break;
                }
                l += 1;
                continue;
            }
            self.set_labels(l, sym);
            if pm >= self.radius(l) {
                continue;
            }

            let point = self.c.point(sym);
            let dch = known_dch.unwrap_or_else(|| {
                self.counters.complex_mults_pd += 2;
                self.pc.delta_channel(l, self.levels[l].residual, point)
            });
            let d = self.levels[l].d_parent + dch + self.pt.delta(l, sym);
            self.syms[l] = sym;
            self.s[l] = point;
            if let Some(trace) = self.trace.as_deref_mut() {
                trace.push(TraceEvent::Visit {
                    parent: self.levels[l].node,
                    level: l,
                    path: self.syms[l..].to_vec(),
                    pruning_metric: pm,
                    pd: d,
                });
            }
            if l == 0 {
                self.leaf(d);
            } else {
                self.expand(l - 1, d);
                l -= 1;
            }
        }
    }

    /// Initializes the children enumeration at `level` below the current path.
    fn expand(&mut self, level: usize, d_parent: f64) {
        let node = self.next_node;
        self.next_node += 1;
        self.counters.expanded_nodes += 1;
        let residual = self.pc.residual(level, &self.s);
        self.counters.complex_mults_pd += (self.m_t - 1 - level) as u64;

        let (pc, pt, c) = (self.pc, self.pt, self.c);
        let state = &mut self.levels[level];
        state.node = node;
        state.residual = residual;
        state.d_parent = d_parent;
        state.pos = 0;
        match self.variant {
            Variant::Typical => {
                state.fes.clear();
                for (m, &p) in c.points().iter().enumerate() {
                    let dch = pc.delta_channel(level, residual, p);
                    state
                        .fes
                        .push((d_parent + dch + pt.delta(level, m), dch, m));
                }
                state
                    .fes
                    .sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
                self.counters.complex_mults_pd += 2 * c.order() as u64;
                self.counters.sorts_full += 1;
            }
            Variant::Channel => {
                state.cursor = Some(c.channel_order(residual / pc.r_diag(level)));
            }
            Variant::Prior => {
                state.slice = c.slice_nearest(residual / pc.r_diag(level));
                state.slice_dch = pc.delta_channel(level, residual, c.point(state.slice));
                self.counters.complex_mults_prune += 2;
            }
        }
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(TraceEvent::Expand { node, level });
        }
    }

    /// Next child at `level`: symbol, pruning metric and, when already
    /// computed, its channel distance.
    fn next_candidate(&mut self, level: usize) -> Option<(usize, f64, Option<f64>)> {
        let state = &mut self.levels[level];
        match self.variant {
            Variant::Typical => {
                let &(pm, dch, sym) = state.fes.get(state.pos)?;
                state.pos += 1;
                Some((sym, pm, Some(dch)))
            }
            Variant::Channel => {
                let sym = state.cursor.as_mut()?.next()?;
                let dch = self
                    .pc
                    .delta_channel(level, state.residual, self.c.point(sym));
                self.counters.complex_mults_pd += 2;
                Some((
                    sym,
                    state.d_parent + dch + self.pt.level_min(level),
                    Some(dch),
                ))
            }
            Variant::Prior => {
                let sym = *self.pt.sorted(level).get(state.pos)? as usize;
                state.pos += 1;
                let pm = state.d_parent + state.slice_dch + self.pt.delta(level, sym);
                let dch = (sym == state.slice).then_some(state.slice_dch);
                Some((sym, pm, dch))
            }
        }
    }

    fn set_labels(&mut self, level: usize, sym: usize) {
        let q = self.q;
        self.labels[level * q..(level + 1) * q].copy_from_slice(self.c.label(sym));
    }

    /// Reference radius of a node whose path fixes the bits of levels
    /// `>= level`.
    fn radius(&self, level: usize) -> f64 {
        if self.lambda_ml == f64::INFINITY {
            return f64::INFINITY;
        }
        let split = level * self.q;
        let mut r2 = self.lambda_ml;
        for &lb in &self.lambda_bar[..split] {
            r2 = r2.max(lb);
        }
        for k in split..self.lambda_bar.len() {
            if self.labels[k] != self.ml_labels[k] {
                r2 = r2.max(self.lambda_bar[k]);
            }
        }
        r2
    }

    fn leaf(&mut self, d: f64) {
        if d < self.lambda_ml {
            if self.lambda_ml.is_finite() {
                for k in 0..self.labels.len() {
                    if self.labels[k] != self.ml_labels[k] {
                        self.lambda_bar[k] = self.lambda_ml;
                    }
                }
            }
            self.lambda_ml = d;
            self.ml_labels.copy_from_slice(&self.labels);
        } else {
            for k in 0..self.labels.len() {
                if self.labels[k] != self.ml_labels[k] && d < self.lambda_bar[k] {
                    self.lambda_bar[k] = d;
                }
            }
        }
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(TraceEvent::Leaf {
                syms: self.syms.clone(),
                metric: d,
                lambda_ml: self.lambda_ml,
                lambda_bar: self.lambda_bar.clone(),
            });
        }
    }

    fn finish(self, options: &DetectOptions) -> Detection {
        let nb = self.labels.len();
        let mut min_pos = vec![0.0; nb];
        let mut min_neg = vec![0.0; nb];
        for k in 0..nb {
            if self.ml_labels[k] > 0 {
                min_pos[k] = self.lambda_ml;
                min_neg[k] = self.lambda_bar[k];
            } else {
                min_pos[k] = self.lambda_bar[k];
                min_neg[k] = self.lambda_ml;
            }
        }
        Detection {
            llr: LlrFrame::from_minima(self.pt.llr_a(), &min_pos, &min_neg, options.llr_clip),
            counters: self.counters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::sphere::qr_preprocess;
    use rand::Rng;

    fn instance(
        seed: u64,
        m_t: usize,
        order: usize,
        prior_scale: f64,
    ) -> (PreprocessedChannel, PriorTable, Constellation) {
        let mut rng = crate::rng::rng_from_seed(seed);
        let c = Constellation::gray_qam(order).unwrap();
        let h = CMatrix::from_fn(m_t, m_t, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let s: Vec<Complex64> = (0..m_t)
            .map(|_| c.point(rng.random_range(0..order)))
            .collect();
        let mut y = h.mul_vec(&s);
        for v in y.iter_mut() {
            *v += Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        }
        let llr: Vec<f64> = (0..m_t * c.bits_per_symbol())
            .map(|_| prior_scale * rng.random_range(-1.0..1.0))
            .collect();
        let pc = qr_preprocess(&h, &y, 0.05).unwrap();
        let pt = PriorTable::build(&llr, &c).unwrap();
        (pc, pt, c)
    }

    #[test]
    fn one_by_one_qpsk_by_hand() {
        let c = Constellation::gray_qam(4).unwrap();
        let pc =
            PreprocessedChannel::new(CMatrix::identity(1), vec![Complex64::new(0.6, -0.2)], 0.25)
                .unwrap();
        let pt = PriorTable::build(&[0.4, -1.0], &c).unwrap();
        let metric = |m: usize| 2.0 * (pc.q_h_y()[0] - c.point(m)).norm_sqr() + pt.delta(0, m);
        for v in Variant::ALL {
            let det = sts_detect(&pc, &pt, &c, v).unwrap();
            for k in 0..2 {
                let min_with = |bit: i8| {
                    (0..4)
                        .filter(|&m| c.label(m)[k] == bit)
                        .map(metric)
                        .fold(f64::INFINITY, f64::min)
                };
                let want = min_with(-1) - min_with(1);
                assert!((det.llr.llr_post[k] - want).abs() < 1e-12);
                assert!((det.llr.llr_ext[k] - (want - pt.llr_a()[k])).abs() < 1e-12);
            }
            assert!(!det.llr.clipped);
        }
    }

    #[test]
    fn typical_evaluates_every_child_per_expansion() {
        let (pc, pt, c) = instance(2, 4, 16, 3.0);
        let mut trace = Vec::new();
        let det = sts_detect_with(
            &pc,
            &pt,
            &c,
            Variant::Typical,
            &DetectOptions::default(),
            Some(&mut trace),
        )
        .unwrap();
        let expansions: Vec<usize> = trace
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Expand { level, .. } => Some(*level),
                _ => None,
            })
            .collect();
        assert_eq!(expansions.len() as u64, det.counters.expanded_nodes);
        let residual_mults: u64 = expansions.iter().map(|&l| (3 - l) as u64).sum();
        assert_eq!(
            det.counters.complex_mults_pd,
            residual_mults + 16 * 2 * det.counters.expanded_nodes
        );
        assert_eq!(det.counters.complex_mults_prune, 0);
        assert_eq!(det.counters.sorts_full, det.counters.expanded_nodes);
    }

    #[test]
    fn variants_agree_on_small_instances() {
        for seed in 0..50 {
            let (pc, pt, c) = instance(seed, 3, 16, 4.0);
            let t = sts_detect(&pc, &pt, &c, Variant::Typical).unwrap();
            for v in [Variant::Channel, Variant::Prior] {
                let other = sts_detect(&pc, &pt, &c, v).unwrap();
                assert_eq!(
                    other.llr.llr_post, t.llr.llr_post,
                    "seed {seed} variant {v}"
                );
            }
        }
    }

    #[test]
    fn llr_clip_option() {
        let (pc, pt, c) = instance(7, 2, 16, 40.0);
        let opts = DetectOptions {
            llr_clip: Some(1.0),
        };
        let det = sts_detect_with(&pc, &pt, &c, Variant::Prior, &opts, None).unwrap();
        assert!(det.llr.llr_post.iter().all(|l| l.abs() <= 1.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (pc, _, c) = instance(1, 3, 16, 1.0);
        let pt = PriorTable::uniform(2, &c);
        assert!(sts_detect(&pc, &pt, &c, Variant::Typical).is_err());
        let qpsk = Constellation::gray_qam(4).unwrap();
        let pt = PriorTable::uniform(3, &c);
        assert!(sts_detect(&pc, &pt, &qpsk, Variant::Typical).is_err());
    }
}
