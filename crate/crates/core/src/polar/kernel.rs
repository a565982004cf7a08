//! Scalar LLR kernels shared by every decoder.
//!
//! LLRs are natural-log ratios `ln P(0)/P(1)`; positive favours bit 0.
//! `sign(0)` is taken as `+1` throughout, so a zero LLR hard-decides to 0.

/// Saturation bound used as the finite stand-in for an infinite LLR.
pub const LLR_MAX: f64 = 1e9;

#[inline]
pub fn saturate(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}

/// Saturating LLR addition.
#[inline]
pub fn sat_add(a: f64, b: f64) -> f64 {
    saturate(a + b)
}

/// Min-sum approximation of the boxplus operator.
#[inline]
pub fn f_tilde(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Exact boxplus `ln((1 + e^(a+b)) / (e^a + e^b))`, evaluated in a form that
/// cannot overflow.
pub fn boxplus_exact(a: f64, b: f64) -> f64 {
    let core = f_tilde(a, b);
    let corr = (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    saturate(core + corr)
}

/// Right-child LLR of the SC recursion: `lambda_j + (1 - 2 beta) lambda_i`.
#[inline]
pub fn g_func(lambda_i: f64, lambda_j: f64, beta_l: u8) -> f64 {
    if beta_l == 0 {
        sat_add(lambda_j, lambda_i)
    } else {
        sat_add(lambda_j, -lambda_i)
    }
}

/// Hard decision: 0 when the LLR is non-negative.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

/// Sign of a bit as an LLR polarity (+1 for 0, -1 for 1).
#[inline]
pub fn bit_sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Combine the partial sums returned by a node's left and right children.
pub fn partial_sum_combine(beta_left: &[u8], beta_right: &[u8]) -> crate::Result<Vec<u8>> {
    if beta_left.len() != beta_right.len() {
        return Err(crate::Error::LengthMismatch {
            expected: beta_left.len(),
            actual: beta_right.len(),
        });
    }
    let mut out = Vec::with_capacity(2 * beta_left.len());
    out.extend(beta_left.iter().zip(beta_right).map(|(l, r)| l ^ r));
    out.extend_from_slice(beta_right);
    Ok(out)
}
