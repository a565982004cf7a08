//! Monte-Carlo BER/FER simulation of staircase codes over BPSK/AWGN.
//!
//! Each point runs a fixed number of independent encoder/decoder streams
//! with split seeds, in rounds of `frames_per_round` frames per stream. The
//! stop rule is checked between rounds, so totals do not depend on the
//! number of worker threads.

mod config;
mod run;

pub use config::{ConstructionKind, SimConfig};
pub use run::{
    calibrate_alphas, calibration_grid, csv_preamble, run_point, run_point_with, run_sweep, write_calibration_csv,
    write_csv, Calibration, CalibrationCell, PointResult, Progress, CSV_HEADER, SEED_SPLIT,
};
