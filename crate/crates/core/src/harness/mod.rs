//! Iterative detection-decoding simulation.
//!
//! Each frame: random info bits, (5/7) encoding with termination, coded-bit
//! interleaving, padding to whole channel uses, Gray mapping, and one fresh
//! Rayleigh matrix per channel use. Each iteration runs the sphere detector
//! on every channel use with the interleaved decoder extrinsics as priors
//! (zero on the first pass), deinterleaves the detector extrinsics into the
//! BCJR decoder, and feeds the decoder's coded-bit extrinsics back.

mod config;
mod report;
mod run;

pub use config::{SimConfig, VariantSchedule};
pub use report::{
    plot_data, results_csv, summary_json, write_results, IterationReport, Verification, CSV_HEADER,
    PLOT_FILE, RESULTS_FILE, SUMMARY_FILE,
};
pub use run::{
    run_experiment, run_iterative_frame, Experiment, FrameOutcome, IterationOutcome, Simulation,
    CODE_RATE,
};
