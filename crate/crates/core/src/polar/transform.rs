//! The polar butterfly network, over GF(2) and over LLRs.

use super::kernel::f_tilde;
use crate::error::{Error, Result};

fn check_len(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(())
}

/// In-place `u * G^{(x)m}` for `G = [[1,0],[1,1]]`.
///
/// The caller guarantees a power-of-two length.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half <<= 1;
    }
}

/// Polar transform of a bit vector. The transform is an involution.
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    check_len(u.len())?;
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// In-place soft counterpart of [`polar_transform_in_place`]: every XOR
/// output wire receives `f~` of its two inputs, pass-through wires are kept.
pub fn soft_transform_in_place(llr: &mut [f64]) {
    let n = llr.len();
    let mut half = 1;
    while half < n {
        for block in llr.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a = f_tilde(*a, *b);
            }
        }
        half <<= 1;
    }
}

pub fn soft_transform(llr: &[f64]) -> Result<Vec<f64>> {
    check_len(llr.len())?;
    let mut out = llr.to_vec();
    soft_transform_in_place(&mut out);
    Ok(out)
}
