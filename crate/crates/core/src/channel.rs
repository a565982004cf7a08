//! BPSK over AWGN: modulation, noise, channel LLRs and Eb/N0 bookkeeping.

use crate::error::{Error, Result};
use crate::polar::kernel::saturate;
use rand::Rng;
use rand_distr::StandardNormal;

/// Name of the generator family used for all simulation randomness.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3), stream-split per point and worker";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// Information bits per transmitted bit.
    pub effective_rate: f64,
    pub noise_seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, effective_rate: f64, noise_seed: u64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidConfig(format!("Eb/N0 {ebn0_db} is not finite")));
        }
        if !(effective_rate > 0.0 && effective_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "effective rate {effective_rate} outside (0, 1]"
            )));
        }
        Ok(ChannelConfig {
            ebn0_db,
            effective_rate,
            noise_seed,
        })
    }

    /// Noise variance per real dimension, `1 / (2 R Eb/N0)`.
    pub fn sigma2(&self) -> f64 {
        sigma2_for(self.ebn0_db, self.effective_rate)
    }
}

pub fn sigma2_for(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// BPSK map: 0 -> +1, 1 -> -1.
#[inline]
pub fn modulate_bit(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit & 1)
}

pub fn modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| modulate_bit(b)).collect()
}

/// Add i.i.d. zero-mean Gaussian noise of variance `sigma2` in place.
pub fn add_noise<R: Rng + ?Sized>(symbols: &mut [f64], sigma2: f64, rng: &mut R) {
    let sigma = sigma2.sqrt();
    for s in symbols.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *s += sigma * z;
    }
}

/// Channel LLR `2 y / sigma^2`, saturated.
#[inline]
pub fn llr_of(y: f64, sigma2: f64) -> f64 {
    saturate(2.0 * y / sigma2)
}

pub fn to_llr(y: &[f64], sigma2: f64) -> Vec<f64> {
    y.iter().map(|&v| llr_of(v, sigma2)).collect()
}

/// Transmit a block of bits and return the channel LLRs, in place into `out`.
pub fn transmit<R: Rng + ?Sized>(bits: &[u8], sigma2: f64, rng: &mut R, out: &mut [f64]) {
    let sigma = sigma2.sqrt();
    for (o, &b) in out.iter_mut().zip(bits) {
        let z: f64 = rng.sample(StandardNormal);
        *o = llr_of(modulate_bit(b) + sigma * z, sigma2);
    }
}
