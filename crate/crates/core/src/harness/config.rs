use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::simchain::Ebn0Convention;
use crate::sphere::Variant;
use crate::{Error, Result};

/// Which detector variant drives each iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantSchedule {
    Fixed(Variant),
    PerIteration(Vec<Variant>),
}

impl VariantSchedule {
    /// Variant of the zero-based iteration `it`.
    pub fn variant_at(&self, it: usize) -> Variant {
        match self {
            VariantSchedule::Fixed(v) => *v,
            VariantSchedule::PerIteration(vs) => vs[it],
        }
    }
}

impl FromStr for VariantSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("schedule:") {
            Some(list) => list
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<_>>>()
                .map(VariantSchedule::PerIteration),
            None => s.parse().map(VariantSchedule::Fixed),
        }
    }
}

impl fmt::Display for VariantSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantSchedule::Fixed(v) => write!(f, "{v}"),
            VariantSchedule::PerIteration(vs) => {
                let names: Vec<&str> = vs.iter().map(|v| v.short_name()).collect();
                write!(f, "schedule:{}", names.join(","))
            }
        }
    }
}

impl<'de> Deserialize<'de> for VariantSchedule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Simulation settings. Read from a flat TOML file; every key is optional
/// and unknown keys are rejected. Defaults reproduce the reference setup:
/// 4x4, 16-QAM, 8 dB, six iterations, 9216 info bits per frame.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub m_t: usize,
    pub m_r: usize,
    pub qam_order: usize,
    pub ebn0_db: Vec<f64>,
    pub ebn0_convention: Ebn0Convention,
    pub iterations: usize,
    pub variant: VariantSchedule,
    pub info_bits: usize,
    pub frames: usize,
    /// When set, overrides `frames` with `ceil(target_info_bits / info_bits)`.
    pub target_info_bits: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub llr_clip: Option<f64>,
    /// Cross-check every channel use against the exhaustive detector.
    pub verify_oracle: bool,
    /// Run all three variants on every channel use, check their LLRs agree,
    /// and report counters for each.
    pub verify_all_variants: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m_t: 4,
            m_r: 4,
            qam_order: 16,
            ebn0_db: vec![8.0],
            ebn0_convention: Ebn0Convention::Receive,
            iterations: 6,
            variant: VariantSchedule::Fixed(Variant::Typical),
            info_bits: 9216,
            frames: 200,
            target_info_bits: None,
            seed: 1,
            out: None,
            llr_clip: None,
            verify_oracle: false,
            verify_all_variants: false,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn frame_count(&self) -> usize {
        match self.target_info_bits {
            Some(bits) => bits.div_ceil(self.info_bits as u64) as usize,
            None => self.frames,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.m_t == 0 {
            return fail("m_t must be at least 1".into());
        }
        if self.m_r < self.m_t {
            return fail(format!("m_r ({}) must be >= m_t ({})", self.m_r, self.m_t));
        }
        if !matches!(self.qam_order, 4 | 16) {
            return fail(format!("qam_order must be 4 or 16, got {}", self.qam_order));
        }
        if self.ebn0_db.is_empty() || self.ebn0_db.iter().any(|e| !e.is_finite()) {
            return fail("ebn0_db must be a non-empty list of finite values".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if let VariantSchedule::PerIteration(vs) = &self.variant {
            if vs.len() != self.iterations {
                return fail(format!(
                    "variant schedule has {} entries for {} iterations",
                    vs.len(),
                    self.iterations
                ));
            }
        }
        if self.info_bits == 0 {
            return fail("info_bits must be at least 1".into());
        }
        if self.frame_count() == 0 {
            return fail("at least one frame is required".into());
        }
        if let Some(c) = self.llr_clip {
            if c.is_nan() || c <= 0.0 {
                return fail(format!("llr_clip must be positive, got {c}"));
            }
        }
        if self.verify_oracle {
            let candidates = (self.qam_order as f64).powi(self.m_t as i32);
            if candidates > crate::oracle::MAX_CANDIDATES as f64 {
                return fail(format!(
                    "verify_oracle needs qam_order^m_t <= {}, got {candidates}",
                    crate::oracle::MAX_CANDIDATES
                ));
            }
        }
        Ok(())
    }

    /// Every field except the output location, in a fixed order.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let list: Vec<String> = self.ebn0_db.iter().map(|e| format!("{e}")).collect();
        let opt = |o: Option<String>| o.unwrap_or_else(|| "none".into());
        vec![
            ("m_t", self.m_t.to_string()),
            ("m_r", self.m_r.to_string()),
            ("qam_order", self.qam_order.to_string()),
            ("ebn0_db", format!("[{}]", list.join(","))),
            ("ebn0_convention", self.ebn0_convention.to_string()),
            ("iterations", self.iterations.to_string()),
            ("variant", self.variant.to_string()),
            ("info_bits", self.info_bits.to_string()),
            ("frames", self.frame_count().to_string()),
            (
                "target_info_bits",
                opt(self.target_info_bits.map(|b| b.to_string())),
            ),
            ("seed", self.seed.to_string()),
            ("llr_clip", opt(self.llr_clip.map(|c| c.to_string()))),
            ("verify_oracle", self.verify_oracle.to_string()),
            ("verify_all_variants", self.verify_all_variants.to_string()),
        ]
    }
}
