use super::{InterleaverSpec, StaircaseConfig};
use crate::crc::CrcLayout;
use crate::error::{Error, Result};
use crate::matrix::BitMatrix;
use crate::polar::polar_transform_in_place;

/// Frame-by-frame staircase encoder.
#[derive(Debug, Clone)]
pub struct StaircaseEncoder {
    half: usize,
    payload: Vec<usize>,
    crc: Option<CrcLayout>,
    interleaver: InterleaverSpec,
    /// Coupled input half-block of the next frame, codeword-major.
    coupled: BitMatrix,
    counter: u64,
    u: Vec<u8>,
}

impl StaircaseEncoder {
    pub fn new(cfg: &StaircaseConfig) -> Result<Self> {
        cfg.validate()?;
        let half = cfg.half();
        Ok(StaircaseEncoder {
            half,
            payload: cfg.payload_positions()?,
            crc: cfg.crc_layout()?,
            interleaver: InterleaverSpec::new(cfg.interleaver, &cfg.code, cfg.rnd_seed)?,
            coupled: BitMatrix::zeros(half, half),
            counter: 0,
            u: vec![0; 2 * half],
        })
    }

    /// Frames encoded so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Coupled half-block that the next frame will absorb.
    pub fn coupled_block(&self) -> &BitMatrix {
        &self.coupled
    }

    pub fn interleaver(&self) -> &InterleaverSpec {
        &self.interleaver
    }

    /// Encode one frame of `N/2 × (K - N/2 - c)` new bits and return the
    /// `N/2 × N/2` block to transmit. Frame 0 absorbs an all-zero coupled
    /// block, so it transmits zeros.
    pub fn encode_next_frame(&mut self, new_bits: &BitMatrix) -> Result<BitMatrix> {
        let m = self.half;
        if new_bits.rows() != m || new_bits.cols() != self.payload.len() {
            return Err(Error::LengthMismatch {
                expected: m * self.payload.len(),
                actual: new_bits.rows() * new_bits.cols(),
            });
        }
        let mut left = BitMatrix::zeros(m, m);
        let mut frame = BitMatrix::zeros(m, m);
        for r in 0..m {
            self.u.fill(0);
            for (&p, &b) in self.payload.iter().zip(new_bits.row(r)) {
                self.u[p] = b & 1;
            }
            if let Some(l) = &self.crc {
                l.fill(&mut self.u);
            }
            self.u[m..].copy_from_slice(self.coupled.row(r));
            polar_transform_in_place(&mut self.u);
            left.row_mut(r).copy_from_slice(&self.u[..m]);
            frame.row_mut(r).copy_from_slice(&self.u[m..]);
        }
        let dir = self.interleaver.decoder_direction(self.counter + 1).inverse();
        self.interleaver.interleave_into(&left, dir, &mut self.coupled);
        self.counter += 1;
        Ok(frame)
    }
}
