//! Interleavers between the coupled half-blocks of consecutive frames.
//!
//! Blocks are stored codeword-major: row `r` holds the half belonging to
//! component codeword `r`. The source of a decoder-side interleave is the
//! right input half of the newer frame's codewords, the target is the left
//! output half of the older frame's codewords.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::polar::{post_decoding_pe, PolarCodeSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterleaverKind {
    /// Alternating 90-degree rotations.
    Std,
    /// Diagonal transposition.
    PolTrs,
    /// Transposition with high-error bits steered onto frozen positions.
    PolFrz,
    /// Transposition followed by a random within-codeword permutation.
    PolRnd,
}

impl std::fmt::Display for InterleaverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InterleaverKind::Std => "std",
            InterleaverKind::PolTrs => "pol_trs",
            InterleaverKind::PolFrz => "pol_frz",
            InterleaverKind::PolRnd => "pol_rnd",
        })
    }
}

impl std::str::FromStr for InterleaverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" => Ok(InterleaverKind::Std),
            "pol_trs" => Ok(InterleaverKind::PolTrs),
            "pol_frz" => Ok(InterleaverKind::PolFrz),
            "pol_rnd" => Ok(InterleaverKind::PolRnd),
            other => Err(Error::InvalidStaircase(format!("unknown interleaver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    RtoC,
    CtoR,
}

impl Direction {
    pub fn inverse(self) -> Self {
        match self {
            Direction::RtoC => Direction::CtoR,
            Direction::CtoR => Direction::RtoC,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterleaverSpec {
    kind: InterleaverKind,
    half: usize,
    seed: u64,
    /// Error-probability rank of each source position, 0 = most reliable.
    pe_rank: Vec<usize>,
    frozen: Vec<usize>,
    /// `forward[src] = dst` for flat indices `r * half + c`, RtoC direction.
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl InterleaverSpec {
    /// Build the interleaver for a staircase component code. Ranks come from
    /// the post-decoding error probabilities of input positions `N/2..N`.
    pub fn new(kind: InterleaverKind, code: &PolarCodeSpec, seed: u64) -> Result<Self> {
        if code.len() < 2 || !code.is_staircase_compatible() {
            return Err(Error::InvalidStaircase(
                "component code must keep its frozen set in the left half".into(),
            ));
        }
        let half = code.len() / 2;
        let pe = post_decoding_pe(code.first_error_prob());
        let pe_rank = ranks(&pe[half..]);
        Self::from_parts(kind, half, pe_rank, code.frozen().to_vec(), seed)
    }

    /// Build from explicit ranks (a permutation of `0..half`) and frozen set.
    pub fn from_parts(
        kind: InterleaverKind,
        half: usize,
        pe_rank: Vec<usize>,
        mut frozen: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        if half == 0 {
            return Err(Error::InvalidStaircase("empty half-block".into()));
        }
        let mut seen = vec![false; half];
        for &r in &pe_rank {
            if r >= half || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidStaircase("ranks are not a permutation".into()));
            }
        }
        if pe_rank.len() != half {
            return Err(Error::LengthMismatch {
                expected: half,
                actual: pe_rank.len(),
            });
        }
        frozen.sort_unstable();
        frozen.dedup();
        if frozen.iter().any(|&f| f >= half) || frozen.len() >= half {
            return Err(Error::InvalidStaircase("frozen set does not fit the left half".into()));
        }
        let forward = build_forward(kind, half, &pe_rank, &frozen, seed);
        let mut inverse = vec![0u32; forward.len()];
        for (s, &d) in forward.iter().enumerate() {
            inverse[d as usize] = s as u32;
        }
        Ok(InterleaverSpec {
            kind,
            half,
            seed,
            pe_rank,
            frozen,
            forward,
            inverse,
        })
    }

    pub fn kind(&self) -> InterleaverKind {
        self.kind
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pe_rank(&self) -> &[usize] {
        &self.pe_rank
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// Target `(row, col)` of source element `(i, j)`.
    pub fn target_of(&self, i: usize, j: usize, direction: Direction) -> (usize, usize) {
        let map = match direction {
            Direction::RtoC => &self.forward,
            Direction::CtoR => &self.inverse,
        };
        let d = map[i * self.half + j] as usize;
        (d / self.half, d % self.half)
    }

    pub fn interleave<T: Copy + Default>(&self, x: &Matrix<T>, direction: Direction) -> Matrix<T> {
        let mut out = Matrix::filled(self.half, self.half, T::default());
        self.interleave_into(x, direction, &mut out);
        out
    }

    /// Apply the interleaver, writing into `out` (same shape as `x`).
    pub fn interleave_into<T: Copy>(&self, x: &Matrix<T>, direction: Direction, out: &mut Matrix<T>) {
        assert!(x.rows() == self.half && x.cols() == self.half, "block side must be N/2");
        assert!(out.rows() == self.half && out.cols() == self.half, "block side must be N/2");
        let map = match direction {
            Direction::RtoC => &self.forward,
            Direction::CtoR => &self.inverse,
        };
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for (s, &d) in map.iter().enumerate() {
            dst[d as usize] = src[s];
        }
    }

    /// Decoder-side direction on the link whose newer frame has absolute
    /// index `newer_frame`. Only the standard interleaver alternates.
    pub fn decoder_direction(&self, newer_frame: u64) -> Direction {
        match self.kind {
            InterleaverKind::Std if newer_frame % 2 == 1 => Direction::CtoR,
            _ => Direction::RtoC,
        }
    }
}

/// Rank positions by ascending value; ties rank the lower index first.
pub fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut rank = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn build_forward(kind: InterleaverKind, m: usize, pe_rank: &[usize], frozen: &[usize], seed: u64) -> Vec<u32> {
    let mut fwd = vec![0u32; m * m];
    let flat = |r: usize, c: usize| (r * m + c) as u32;
    match kind {
        InterleaverKind::Std => {
            for i in 0..m {
                for j in 0..m {
                    fwd[i * m + j] = flat(j, m - 1 - i);
                }
            }
        }
        InterleaverKind::PolTrs | InterleaverKind::PolFrz | InterleaverKind::PolRnd => {
            // position of source column j inside every target codeword
            let column_target: Vec<Vec<usize>> = match kind {
                InterleaverKind::PolTrs => vec![(0..m).collect(); m],
                InterleaverKind::PolFrz => vec![frozen_steering(m, pe_rank, frozen); m],
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..m)
                        .map(|_| {
                            let mut p: Vec<usize> = (0..m).collect();
                            p.shuffle(&mut rng);
                            p
                        })
                        .collect()
                }
            };
            // target (t, sigma_t(j)) takes source ((t - j) mod m, j)
            for t in 0..m {
                for j in 0..m {
                    let s = (t + m - j) % m;
                    fwd[s * m + j] = flat(t, column_target[t][j]);
                }
            }
        }
    }
    fwd
}

/// Within-codeword placement: the `|F|` highest-rank columns go to the frozen
/// indices (highest rank to lowest index), the rest fill the remaining
/// indices in ascending rank.
fn frozen_steering(m: usize, pe_rank: &[usize], frozen: &[usize]) -> Vec<usize> {
    let mut by_rank = vec![0usize; m];
    for (j, &r) in pe_rank.iter().enumerate() {
        by_rank[r] = j;
    }
    let mut is_frozen = vec![false; m];
    for &f in frozen {
        is_frozen[f] = true;
    }
    let mut target = vec![0usize; m];
    let mut descending = by_rank.iter().rev();
    for &f in frozen {
        target[*descending.next().unwrap()] = f;
    }
    let free = (0..m).filter(|&p| !is_frozen[p]);
    for (&j, p) in by_rank[..m - frozen.len()].iter().zip(free) {
        target[j] = p;
    }
    target
}
