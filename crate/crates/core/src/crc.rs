//! Short CRCs over bit vectors, used as the outer code of each component
//! codeword. Zero init, zero xorout, no reflection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrcSpec {
    width: u32,
    /// Generator polynomial including the leading `x^width` term, MSB first.
    poly: u64,
}

impl CrcSpec {
    /// `x^3 + x + 1`
    pub const CRC3: CrcSpec = CrcSpec { width: 3, poly: 0b1011 };
    /// `x^4 + x + 1`
    pub const CRC4: CrcSpec = CrcSpec { width: 4, poly: 0b1_0011 };

    /// Build from a full generator bitmask; the width is its degree.
    pub fn from_poly(poly: u64) -> Result<Self> {
        if poly < 2 {
            return Err(Error::InvalidCrc(format!("polynomial {poly:#b} has degree < 1")));
        }
        let width = 63 - poly.leading_zeros();
        if width > 32 {
            return Err(Error::InvalidCrc(format!("degree {width} exceeds 32")));
        }
        if poly.count_ones() < 2 {
            return Err(Error::InvalidCrc(format!(
                "polynomial {poly:#b} needs at least two nonzero terms"
            )));
        }
        Ok(CrcSpec { width, poly })
    }

    /// Default generator for a given width (3 or 4 bits).
    pub fn default_for_width(width: u32) -> Result<Self> {
        match width {
            3 => Ok(Self::CRC3),
            4 => Ok(Self::CRC4),
            w => Err(Error::InvalidCrc(format!("no default polynomial for width {w}"))),
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    fn remainder(&self, bits: impl Iterator<Item = u8>) -> u64 {
        let w = self.width;
        let mask = (1u64 << w) - 1;
        let low = self.poly & mask;
        let mut reg = 0u64;
        for b in bits {
            let top = ((reg >> (w - 1)) & 1) as u8 ^ (b & 1);
            reg = (reg << 1) & mask;
            if top == 1 {
                reg ^= low;
            }
        }
        reg
    }

    fn to_bits(&self, reg: u64) -> Vec<u8> {
        (0..self.width).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }

    /// Remainder of `message * x^c` modulo the generator, MSB first.
    pub fn compute(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.is_empty() {
            return Err(Error::InvalidCrc("empty message".into()));
        }
        Ok(self.to_bits(self.remainder(message.iter().copied())))
    }

    /// Write the CRC of `message` into `out` (length `width`).
    pub fn compute_into(&self, message: &[u8], out: &mut [u8]) {
        let reg = self.remainder(message.iter().copied());
        for (i, o) in out.iter_mut().enumerate() {
            *o = ((reg >> (self.width as usize - 1 - i)) & 1) as u8;
        }
    }

    /// True iff `codeword = message || crc` has a zero remainder.
    pub fn check(&self, codeword: &[u8]) -> Result<bool> {
        if codeword.len() <= self.width() {
            return Err(Error::InvalidCrc(format!(
                "codeword of length {} carries no payload for a {}-bit CRC",
                codeword.len(),
                self.width
            )));
        }
        Ok(self.check_unchecked(codeword))
    }

    /// [`CrcSpec::check`] without the length precondition.
    pub fn check_unchecked(&self, codeword: &[u8]) -> bool {
        let (msg, crc) = codeword.split_at(codeword.len() - self.width());
        let reg = self.remainder(msg.iter().copied());
        crc.iter()
            .enumerate()
            .all(|(i, &b)| ((reg >> (self.width as usize - 1 - i)) & 1) as u8 == b)
    }
}

/// Where the protected bits and CRC bits sit inside a component input vector:
/// the non-frozen left-half positions in ascending order, CRC last.
#[derive(Debug, Clone, PartialEq)]
pub struct CrcLayout {
    crc: CrcSpec,
    positions: Vec<usize>,
}

impl CrcLayout {
    pub fn for_code(code: &crate::polar::PolarCodeSpec, crc: CrcSpec) -> Result<Self> {
        let positions = code.left_info_positions();
        if positions.len() <= crc.width() {
            return Err(Error::InvalidCrc(format!(
                "{} left-half information positions leave no payload for a {}-bit CRC",
                positions.len(),
                crc.width()
            )));
        }
        Ok(CrcLayout { crc, positions })
    }

    pub fn crc(&self) -> CrcSpec {
        self.crc
    }

    /// Positions of the payload bits followed by the CRC bits.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn payload_len(&self) -> usize {
        self.positions.len() - self.crc.width()
    }

    /// Check the CRC carried by an estimated input vector.
    pub fn passes(&self, u: &[u8]) -> bool {
        let mut buf = [0u8; 256];
        if self.positions.len() <= buf.len() {
            for (b, &p) in buf.iter_mut().zip(&self.positions) {
                *b = u[p];
            }
            self.crc.check_unchecked(&buf[..self.positions.len()])
        } else {
            let v: Vec<u8> = self.positions.iter().map(|&p| u[p]).collect();
            self.crc.check_unchecked(&v)
        }
    }

    /// Fill the CRC positions of `u` from its payload positions.
    pub fn fill(&self, u: &mut [u8]) {
        let payload: Vec<u8> = self.positions[..self.payload_len()].iter().map(|&p| u[p]).collect();
        let mut crc = vec![0u8; self.crc.width()];
        self.crc.compute_into(&payload, &mut crc);
        for (&p, b) in self.positions[self.payload_len()..].iter().zip(crc) {
            u[p] = b;
        }
    }
}
