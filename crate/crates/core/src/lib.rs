//! Staircase codes built from non-systematic polar component codes.
//!
//! The crate provides the component-code machinery (construction, polar
//! transforms, CRC, and the soft-in soft-out SCL/SCAN/SCANL decoders), the
//! staircase encoder and sliding-window decoder with polar-aware
//! interleavers, a BPSK/AWGN channel, and a Monte-Carlo BER harness.

pub mod channel;
pub mod crc;
pub mod decoder;
mod error;
pub mod matrix;
pub mod polar;
pub mod sim;
pub mod staircase;

pub use error::{Error, Result};
