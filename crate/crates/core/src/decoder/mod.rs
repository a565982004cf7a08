//! Soft-in soft-out decoders for a single polar component codeword.
//!
//! [`sc_decode`] and [`scl_decode`] are hard-output building blocks; the
//! staircase decoder uses one of the soft-output algorithms through
//! [`ComponentDecoder`].

mod sc;
mod scan;
mod scanl;
mod scl;
mod soft_scl;

pub use sc::{sc_decode, ScDecoder};
pub use scan::{scan_decode, ScanDecoder};
pub use scanl::{scanl_decode, stage_permutations, ScanlDecoder};
pub use scl::{scl_decode, ListPath, SclDecoder};
pub use soft_scl::{soft_scl_decode, SoftSclDecoder};

use crate::crc::{CrcLayout, CrcSpec};
use crate::error::{Error, Result};
use crate::polar::PolarCodeSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SoftScl,
    Scan,
    Scanl,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::SoftScl => "soft_scl",
            Algorithm::Scan => "scan",
            Algorithm::Scanl => "scanl",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft_scl" => Ok(Algorithm::SoftScl),
            "scan" => Ok(Algorithm::Scan),
            "scanl" => Ok(Algorithm::Scanl),
            other => Err(Error::InvalidDecoder(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    /// List size (soft-SCL) or number of graph permutations (SCANL).
    pub list_size: usize,
    /// SCAN iterations (SCAN and SCANL).
    pub iterations: usize,
    /// Extrinsic scaling factor.
    pub alpha_e: f64,
    /// Path-metric scaling factor (soft-SCL only).
    pub alpha_b: f64,
    /// Inclusive index range of sorted input magnitudes summed when all
    /// soft-SCL survivors agree on a bit.
    pub k_min: usize,
    pub k_max: usize,
    pub crc: Option<CrcSpec>,
    pub permutation_seed: u64,
}

impl DecoderConfig {
    /// Defaults for a component code of length `n_len`.
    pub fn new(algorithm: Algorithm, n_len: usize) -> Self {
        DecoderConfig {
            algorithm,
            list_size: 8,
            iterations: if algorithm == Algorithm::SoftScl { 1 } else { 4 },
            alpha_e: 0.5,
            alpha_b: 0.5,
            k_min: 0,
            k_max: default_k_max(n_len),
            crc: None,
            permutation_seed: 0,
        }
    }

    pub fn validate(&self, n_len: usize) -> Result<()> {
        if self.list_size == 0 {
            return Err(Error::InvalidDecoder("list size must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidDecoder("iteration count must be at least 1".into()));
        }
        for (name, a) in [("alpha_e", self.alpha_e), ("alpha_b", self.alpha_b)] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidDecoder(format!("{name} = {a} outside (0, 1]")));
            }
        }
        if self.k_min > self.k_max || self.k_max >= n_len {
            return Err(Error::InvalidDecoder(format!(
                "need k_min <= k_max < {n_len}, got {}..={}",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }
}

/// `min(N/8, 15) - 1`, at least 0.
pub fn default_k_max(n_len: usize) -> usize {
    (n_len / 8).clamp(1, 15) - 1
}

/// Output of a soft-in soft-out component decode.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftDecodeResult {
    /// Extrinsic LLRs for the codeword bits.
    pub extrinsic: Vec<f64>,
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    /// CRC status of the selected candidate; false when no CRC is configured.
    pub crc_pass: bool,
    /// Path metric of the selected candidate (0 for SCAN).
    pub selected_metric: f64,
}

impl SoftDecodeResult {
    pub fn new(n_len: usize) -> Self {
        SoftDecodeResult {
            extrinsic: vec![0.0; n_len],
            u_hat: vec![0; n_len],
            x_hat: vec![0; n_len],
            crc_pass: false,
            selected_metric: 0.0,
        }
    }
}

/// Reusable decoder for one component code, dispatching on the algorithm.
#[derive(Debug, Clone)]
pub enum ComponentDecoder {
    SoftScl(SoftSclDecoder),
    Scan(ScanDecoder),
    Scanl(ScanlDecoder),
}

impl ComponentDecoder {
    pub fn new(code: &PolarCodeSpec, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate(code.len())?;
        Ok(match cfg.algorithm {
            Algorithm::SoftScl => ComponentDecoder::SoftScl(SoftSclDecoder::new(code, cfg)?),
            Algorithm::Scan => ComponentDecoder::Scan(ScanDecoder::new(code, cfg)?),
            Algorithm::Scanl => ComponentDecoder::Scanl(ScanlDecoder::new(code, cfg)?),
        })
    }

    pub fn decode(&mut self, llr: &[f64], out: &mut SoftDecodeResult) {
        match self {
            ComponentDecoder::SoftScl(d) => d.decode(llr, out),
            ComponentDecoder::Scan(d) => d.decode(llr, out),
            ComponentDecoder::Scanl(d) => d.decode(llr, out),
        }
    }
}

pub(crate) fn crc_layout(code: &PolarCodeSpec, crc: Option<CrcSpec>) -> Result<Option<CrcLayout>> {
    crc.map(|c| CrcLayout::for_code(code, c)).transpose()
}
