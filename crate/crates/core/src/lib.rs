//! Soft-input soft-output sphere decoding for iterative MIMO receivers.
//!
//! The detector computes exact max-log LLRs with a single depth-first tree
//! search and supports three child-ordering strategies:
//!
//! - [`Variant::Typical`]: Schnorr-Euchner order on the full metric, realized
//!   by enumerating and sorting every child (FES).
//! - [`Variant::Channel`]: children in ascending channel distance, pruned
//!   with the per-level minimum prior cost as a lower bound.
//! - [`Variant::Prior`]: children in ascending prior cost, pruned with the
//!   geometrically sliced minimum channel distance as a lower bound.
//!
//! All three produce identical LLRs and differ only in the work they do,
//! which is tracked in [`Counters`]. Around the detector sit a Gray QAM
//! [`constellation`], the rate-1/2 (5/7) recursive systematic convolutional
//! [`coding`] chain with a log-MAP BCJR decoder, a Rayleigh [`simchain`], an
//! exhaustive [`oracle`], and the iterative simulation [`harness`].

pub mod coding;
pub mod constellation;
mod error;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod prior;
pub mod rng;
pub mod simchain;
pub mod sphere;

pub use constellation::Constellation;
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use prior::PriorTable;
pub use sphere::{
    qr_preprocess, repeated_sd_detect, sts_detect, Counters, Detection, LlrFrame,
    PreprocessedChannel, Variant,
};
