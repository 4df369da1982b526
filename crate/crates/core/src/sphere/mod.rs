//! Soft-input soft-output sphere detection.
//!
//! The search tree has one level per transmit stream. Level indices here are
//! zero-based: the search starts at level `M_T - 1` (children of the root)
//! and reaches leaves at level 0. The partial distance of a node is
//! `D(s_i) = D(s_{i+1}) + dch(s_i) + dpr(s_i)`.

mod preprocess;
mod repeated;
mod sts;

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use preprocess::{qr_preprocess, PreprocessedChannel};
pub use repeated::repeated_sd_detect;
pub use sts::{sts_detect, sts_detect_with, DetectOptions, Detection, TraceEvent};

/// Child ordering and pruning-metric strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Full enumeration and sorting on the exact metric increment.
    Typical,
    /// Ascending channel distance; prior replaced by its level minimum.
    Channel,
    /// Ascending prior cost; channel distance replaced by its level minimum.
    Prior,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Typical, Variant::Channel, Variant::Prior];

    pub fn short_name(self) -> &'static str {
        match self {
            Variant::Typical => "t",
            Variant::Channel => "ch",
            Variant::Prior => "pr",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t" | "typical" => Ok(Variant::Typical),
            "ch" | "channel" => Ok(Variant::Channel),
            "pr" | "prior" => Ok(Variant::Prior),
            other => Err(crate::Error::Config(format!("unknown variant {other:?}"))),
        }
    }
}

/// Lower bound compared against the squared radius in a constraint check.
///
/// `T` uses the exact partial distance; `Ch` swaps the symbol's prior cost
/// for the level minimum; `Pr` swaps its channel distance for the level
/// minimum. Both substitutions can only lower the value.
#[inline]
pub fn pruning_metric(
    variant: Variant,
    d_parent: f64,
    dch: f64,
    dpr: f64,
    level_min_prior: f64,
    min_dch_at_level: f64,
) -> f64 {
    match variant {
        Variant::Typical => d_parent + dch + dpr,
        Variant::Channel => d_parent + dch + level_min_prior,
        Variant::Prior => d_parent + min_dch_at_level + dpr,
    }
}

/// Work done by one or more detections.
///
/// Multiplication accounting: computing the interference-cancelled residual
/// of a level costs one complex multiplication per already-fixed symbol,
/// each channel distance costs two, and prior lookups, additions and
/// comparisons are free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub expanded_nodes: u64,
    pub complex_mults_pd: u64,
    pub complex_mults_prune: u64,
    pub sorts_full: u64,
    pub min_ops: u64,
}

impl Counters {
    pub fn complex_mults_total(&self) -> u64 {
        self.complex_mults_pd + self.complex_mults_prune
    }
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Counters) {
        self.expanded_nodes += rhs.expanded_nodes;
        self.complex_mults_pd += rhs.complex_mults_pd;
        self.complex_mults_prune += rhs.complex_mults_prune;
        self.sorts_full += rhs.sorts_full;
        self.min_ops += rhs.min_ops;
    }
}

/// A-priori, a-posteriori and extrinsic bit LLRs of one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub llr_a: Vec<f64>,
    pub llr_post: Vec<f64>,
    pub llr_ext: Vec<f64>,
    /// Set when some bit hypothesis had no leaf and its LLR was clipped.
    pub clipped: bool,
}

impl LlrFrame {
    /// Builds the frame from per-bit minimum metrics of the `+1` and `-1`
    /// hypothesis sets.
    pub(crate) fn from_minima(
        llr_a: &[f64],
        min_pos: &[f64],
        min_neg: &[f64],
        clip: Option<f64>,
    ) -> Self {
        let mut clipped = false;
        let llr_post: Vec<f64> = min_pos
            .iter()
            .zip(min_neg)
            .map(|(&p, &n)| {
                let mut l = n - p;
                if !l.is_finite() {
                    clipped = true;
                }
                if let Some(c) = clip {
                    l = if l.is_nan() { 0.0 } else { l.clamp(-c, c) };
                }
                l
            })
            .collect();
        let llr_ext = llr_post.iter().zip(llr_a).map(|(p, a)| p - a).collect();
        LlrFrame {
            llr_a: llr_a.to_vec(),
            llr_post,
            llr_ext,
            clipped,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pruning_metric_examples() {
        let uniform = 4.0 * 2f64.ln();
        let t = pruning_metric(Variant::Typical, 1.5, 0.25, uniform, uniform, 0.1);
        let ch = pruning_metric(Variant::Channel, 1.5, 0.25, uniform, uniform, 0.1);
        assert_eq!(t, ch);
        assert_eq!(t, 1.5 + 0.25 + uniform);
        assert_eq!(
            pruning_metric(Variant::Prior, 1.5, 0.25, uniform, uniform, 0.1),
            1.6 + uniform
        );
    }

    #[test]
    fn pruning_metrics_bound_the_exact_metric() {
        let mut rng = crate::rng::rng_from_seed(1);
        for _ in 0..100_000 {
            let d_parent = rng.random_range(0.0..100.0);
            let dch = rng.random_range(0.0..50.0);
            let dpr = rng.random_range(0.0..50.0);
            let min_prior = dpr * rng.random_range(0.0..=1.0);
            let min_dch = dch * rng.random_range(0.0..=1.0);
            let t = pruning_metric(Variant::Typical, d_parent, dch, dpr, min_prior, min_dch);
            assert!(pruning_metric(Variant::Channel, d_parent, dch, dpr, min_prior, min_dch) <= t);
            assert!(pruning_metric(Variant::Prior, d_parent, dch, dpr, min_prior, min_dch) <= t);
        }
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("T".parse::<Variant>().unwrap(), Variant::Typical);
        assert_eq!("ch".parse::<Variant>().unwrap(), Variant::Channel);
        assert_eq!("prior".parse::<Variant>().unwrap(), Variant::Prior);
        assert!("x".parse::<Variant>().is_err());
        for v in Variant::ALL {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
    }
}
