//! Bit-channel reliability estimation and frozen-set construction.

use crate::error::{Error, Result};

/// How bit-channel reliabilities are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    /// Bhattacharyya recursion for a binary erasure channel with erasure
    /// probability `z` in `[0, 1)`.
    Bhattacharyya { erasure_prob: f64 },
    /// Gaussian approximation of density evolution for BPSK over AWGN at the
    /// given design Eb/N0 (dB), for a code transmitting at `rate`.
    GaussianApprox { design_ebn0_db: f64, rate: f64 },
}

/// Per-position reliability scores and first-error probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BitChannelProfile {
    /// Native score of the method: Bhattacharyya parameter (higher is worse)
    /// or mean LLR of the bit channel (higher is better).
    pub scores: Vec<f64>,
    pub higher_is_better: bool,
    /// Probability that position `i` is the first decoding error.
    pub first_error_prob: Vec<f64>,
}

impl BitChannelProfile {
    /// Scores re-oriented so that a larger value means a less reliable position.
    pub fn unreliability(&self) -> Vec<f64> {
        if self.higher_is_better {
            self.scores.iter().map(|s| -s).collect()
        } else {
            self.scores.clone()
        }
    }
}

/// Estimate the reliability of the `2^n` bit channels.
pub fn build_reliabilities(n: u32, method: Construction) -> Result<BitChannelProfile> {
    if n == 0 || n > 24 {
        return Err(Error::InvalidCode(format!("log2 length {n} out of range")));
    }
    match method {
        Construction::Bhattacharyya { erasure_prob: z } => {
            if !(0.0..1.0).contains(&z) {
                return Err(Error::InvalidDesignParameter(z));
            }
            let scores = bhattacharyya(n, z);
            let first_error_prob = scores.iter().map(|z| z / 2.0).collect();
            Ok(BitChannelProfile {
                scores,
                higher_is_better: false,
                first_error_prob,
            })
        }
        Construction::GaussianApprox {
            design_ebn0_db,
            rate,
        } => {
            if !design_ebn0_db.is_finite() {
                return Err(Error::InvalidDesignParameter(design_ebn0_db));
            }
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(Error::InvalidDesignParameter(rate));
            }
            // Mean channel LLR of BPSK over AWGN: 2 / sigma^2 = 4 R Eb/N0.
            let mean = 4.0 * rate * 10f64.powf(design_ebn0_db / 10.0);
            let scores = gaussian_approx(n, mean);
            let first_error_prob = scores.iter().map(|&m| q_function((m / 2.0).sqrt())).collect();
            Ok(BitChannelProfile {
                scores,
                higher_is_better: true,
                first_error_prob,
            })
        }
    }
}

fn bhattacharyya(n: u32, z: f64) -> Vec<f64> {
    let mut cur = vec![z];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &z in &cur {
            next.push(2.0 * z - z * z);
            next.push(z * z);
        }
        cur = next;
    }
    cur
}

fn gaussian_approx(n: u32, mean: f64) -> Vec<f64> {
    let mut cur = vec![mean];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &m in &cur {
            next.push(check_node_mean(m));
            next.push(2.0 * m);
        }
        cur = next;
    }
    cur
}

/// `ln phi(x)` for the Chung et al. approximation of the GA phi function.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// `phi^-1(1 - (1 - phi(m))^2)`, solved by bisection in the log domain.
fn check_node_mean(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let lp = ln_phi(m);
    let p = lp.exp();
    // 1 - (1 - p)^2 = p (2 - p)
    let target = lp + (2.0 - p).ln();
    if target >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, m);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Frozen set for a staircase component code: the `N - K` least reliable
/// positions among the left half. Ties freeze the lower index first.
pub fn build_staircase_frozen_set(n_len: usize, k: usize, unreliability: &[f64]) -> Result<Vec<usize>> {
    if unreliability.len() != n_len {
        return Err(Error::LengthMismatch {
            expected: n_len,
            actual: unreliability.len(),
        });
    }
    if k == 0 || k > n_len {
        return Err(Error::InvalidCode(format!("dimension {k} invalid for length {n_len}")));
    }
    let n_frozen = n_len - k;
    let half = n_len / 2;
    if n_frozen > half {
        return Err(Error::InvalidCode(format!(
            "{n_frozen} frozen bits do not fit in the left half of a length-{n_len} code"
        )));
    }
    let mut candidates: Vec<usize> = (0..half).collect();
    candidates.sort_by(|&a, &b| {
        unreliability[b]
            .partial_cmp(&unreliability[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut frozen: Vec<usize> = candidates.into_iter().take(n_frozen).collect();
    frozen.sort_unstable();
    Ok(frozen)
}

/// Post-decoding error probability under serial decoding:
/// `P_e[i] = min(1, P_1e[i] + 0.5 * sum_{j<i} P_1e[j])`.
pub fn post_decoding_pe(first_error_prob: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    first_error_prob
        .iter()
        .map(|&p| {
            let pe = (p + 0.5 * acc).min(1.0);
            acc += p;
            pe
        })
        .collect()
}

/// A polar code: length, frozen set and the bit-channel model it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCodeSpec {
    n: u32,
    k: usize,
    frozen: Vec<usize>,
    frozen_mask: Vec<bool>,
    reliability: Vec<f64>,
    first_error_prob: Vec<f64>,
}

impl PolarCodeSpec {
    /// Code with an explicit frozen set and a flat (uninformative) profile.
    pub fn with_frozen(n: u32, frozen: &[usize]) -> Result<Self> {
        let len = 1usize << n;
        let mut mask = vec![false; len];
        for &f in frozen {
            if f >= len || mask[f] {
                return Err(Error::InvalidCode(format!("bad frozen position {f}")));
            }
            mask[f] = true;
        }
        if frozen.len() == len {
            return Err(Error::InvalidCode("dimension must be positive".into()));
        }
        let mut sorted = frozen.to_vec();
        sorted.sort_unstable();
        let first_error_prob = mask.iter().map(|&f| if f { 0.0 } else { 0.5 }).collect();
        Ok(PolarCodeSpec {
            n,
            k: len - frozen.len(),
            frozen: sorted,
            frozen_mask: mask,
            reliability: vec![0.0; len],
            first_error_prob,
        })
    }

    /// Staircase component code: frozen set confined to the left half.
    pub fn staircase(n: u32, k: usize, construction: Construction) -> Result<Self> {
        let profile = build_reliabilities(n, construction)?;
        let len = 1usize << n;
        let frozen = build_staircase_frozen_set(len, k, &profile.unreliability())?;
        let mut spec = Self::with_frozen(n, &frozen)?;
        spec.reliability = if profile.higher_is_better {
            profile.scores.clone()
        } else {
            profile.scores.iter().map(|z| -z).collect()
        };
        spec.first_error_prob = profile
            .first_error_prob
            .iter()
            .zip(&spec.frozen_mask)
            .map(|(&p, &f)| if f { 0.0 } else { p.clamp(0.0, 1.0) })
            .collect();
        Ok(spec)
    }

    #[inline]
    pub fn log2_len(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    /// Reliability scores, higher is more reliable.
    pub fn reliability(&self) -> &[f64] {
        &self.reliability
    }

    /// First-error probabilities, zero on frozen positions.
    pub fn first_error_prob(&self) -> &[f64] {
        &self.first_error_prob
    }

    /// Non-frozen positions in the left half, ascending.
    pub fn left_info_positions(&self) -> Vec<usize> {
        (0..self.len() / 2).filter(|&i| !self.frozen_mask[i]).collect()
    }

    /// Whether the frozen set lies entirely in the left half.
    pub fn is_staircase_compatible(&self) -> bool {
        self.frozen.iter().all(|&f| f < self.len() / 2)
    }
}
