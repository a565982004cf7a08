//! Staircase codes over non-systematic polar component codes.
//!
//! Every component input vector is `u = [u_new ∥ x']`: new information (and
//! CRC) bits on the non-frozen left-half positions, and the coupled
//! half-block `x'` taken from the previous frame. The right half of
//! `u · G^{(x)n}` is transmitted, the left half is interleaved into the next
//! frame.

mod encoder;
mod interleaver;
mod window;

pub use encoder::StaircaseEncoder;
pub use interleaver::{ranks, Direction, InterleaverKind, InterleaverSpec};
pub use window::{apply_decoding_reduction, DecodingWindow, ReductionDecision};

use crate::crc::{CrcLayout, CrcSpec};
use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};
use crate::polar::PolarCodeSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseConfig {
    /// Component code; its frozen set must lie in the left half.
    pub code: PolarCodeSpec,
    /// Window depth `W`; the window holds `W + 1` frames.
    pub window: usize,
    pub interleaver: InterleaverKind,
    pub rnd_seed: u64,
    pub crc: Option<CrcSpec>,
    /// Component decoder settings. Its `crc` field is replaced by [`Self::crc`].
    pub decoder: DecoderConfig,
    pub passes_per_frame: usize,
    pub back_propagate: bool,
    pub decoding_reduction: bool,
}

impl StaircaseConfig {
    /// Defaults: `W = 5`, std interleaver, no CRC, one pass, no back-propagation.
    pub fn new(code: PolarCodeSpec, decoder: DecoderConfig) -> Self {
        StaircaseConfig {
            code,
            window: 5,
            interleaver: InterleaverKind::Std,
            rnd_seed: 0,
            crc: None,
            decoder,
            passes_per_frame: 1,
            back_propagate: false,
            decoding_reduction: false,
        }
    }

    /// Side of a frame, `M = N/2`.
    pub fn half(&self) -> usize {
        self.code.len() / 2
    }

    pub fn crc_width(&self) -> usize {
        self.crc.map_or(0, |c| c.width())
    }

    /// New information bits per component codeword, `K - N/2 - c`.
    pub fn new_bits_per_codeword(&self) -> usize {
        self.code.dimension().saturating_sub(self.half() + self.crc_width())
    }

    /// New information bits carried by one frame.
    pub fn new_bits_per_frame(&self) -> usize {
        self.half() * self.new_bits_per_codeword()
    }

    /// Information bits per transmitted bit, CRC overhead charged.
    pub fn effective_rate(&self) -> f64 {
        self.new_bits_per_codeword() as f64 / self.half() as f64
    }

    /// Decoder settings with the staircase CRC installed.
    pub fn component_decoder(&self) -> DecoderConfig {
        let mut d = self.decoder.clone();
        d.crc = self.crc;
        d
    }

    pub(crate) fn crc_layout(&self) -> Result<Option<CrcLayout>> {
        self.crc.map(|c| CrcLayout::for_code(&self.code, c)).transpose()
    }

    /// Input positions carrying new information bits, ascending.
    pub fn payload_positions(&self) -> Result<Vec<usize>> {
        Ok(match self.crc_layout()? {
            Some(l) => l.positions()[..l.payload_len()].to_vec(),
            None => self.code.left_info_positions(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.code.len();
        if n < 4 {
            return Err(Error::InvalidStaircase(format!("component length {n} too short")));
        }
        if !self.code.is_staircase_compatible() {
            return Err(Error::InvalidStaircase("frozen set must lie in the left half".into()));
        }
        if self.window == 0 {
            return Err(Error::InvalidStaircase("window depth must be at least 1".into()));
        }
        if self.passes_per_frame == 0 {
            return Err(Error::InvalidStaircase("passes per frame must be at least 1".into()));
        }
        if self.decoding_reduction && self.crc.is_none() {
            return Err(Error::InvalidStaircase("decoding reduction requires a CRC".into()));
        }
        if self.code.dimension() < self.half() + self.crc_width() + 1 {
            return Err(Error::InvalidStaircase(format!(
                "K = {} leaves no new information bits (N/2 = {}, CRC width {})",
                self.code.dimension(),
                self.half(),
                self.crc_width()
            )));
        }
        self.crc_layout()?;
        self.component_decoder().validate(n)
    }
}
