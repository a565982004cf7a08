use super::{InterleaverSpec, StaircaseConfig};
use crate::decoder::{ComponentDecoder, SoftDecodeResult};
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, LlrBlock};
use crate::polar::kernel::{hard_decision, sat_add, LLR_MAX};
use crate::polar::soft_transform_in_place;
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionDecision {
    Decode,
    Skip,
    /// Decoded because the previous opportunity was skipped.
    ForcedDecode,
}

impl ReductionDecision {
    pub fn decodes(self) -> bool {
        self != ReductionDecision::Skip
    }
}

/// Skip a codeword whose CRC passed, unless it was skipped last time.
pub fn apply_decoding_reduction(crc_passed: bool, skipped_last: bool) -> ReductionDecision {
    match (crc_passed, skipped_last) {
        (false, _) => ReductionDecision::Decode,
        (true, false) => ReductionDecision::Skip,
        (true, true) => ReductionDecision::ForcedDecode,
    }
}

#[derive(Debug, Clone)]
struct Frame {
    index: u64,
    channel: LlrBlock,
    gamma: LlrBlock,
    /// Latest extrinsic left halves of this frame's codewords.
    ext_left: LlrBlock,
    /// Latest new-bit estimates of this frame's codewords.
    new_bits: BitMatrix,
    crc_passed: Vec<bool>,
    skipped_last: Vec<bool>,
}

impl Frame {
    fn blank(half: usize, payload: usize) -> Self {
        Frame {
            index: 0,
            channel: LlrBlock::zeros(half, half),
            gamma: LlrBlock::zeros(half, half),
            ext_left: LlrBlock::zeros(half, half),
            new_bits: BitMatrix::zeros(half, payload),
            crc_passed: vec![false; half],
            skipped_last: vec![false; half],
        }
    }

    fn reset(&mut self, index: u64) {
        self.index = index;
        self.gamma.fill(0.0);
        self.ext_left.fill(0.0);
        self.new_bits.fill(0);
        self.crc_passed.fill(false);
        self.skipped_last.fill(false);
    }
}

/// Sliding-window soft decoder holding the `W + 1` most recent frames,
/// oldest at index 0.
#[derive(Debug, Clone)]
pub struct DecodingWindow {
    half: usize,
    depth: usize,
    passes: usize,
    back_propagate: bool,
    reduction: bool,
    use_crc: bool,
    payload: Vec<usize>,
    interleaver: InterleaverSpec,
    decoder: ComponentDecoder,
    frames: VecDeque<Frame>,
    spare: Option<Frame>,
    next_index: u64,
    lam: LlrBlock,
    lam_target: LlrBlock,
    input: Vec<f64>,
    result: SoftDecodeResult,
    decodes_performed: u64,
    decodes_possible: u64,
}

impl DecodingWindow {
    pub fn new(cfg: &StaircaseConfig) -> Result<Self> {
        cfg.validate()?;
        let half = cfg.half();
        Ok(DecodingWindow {
            half,
            depth: cfg.window,
            passes: cfg.passes_per_frame,
            back_propagate: cfg.back_propagate,
            reduction: cfg.decoding_reduction,
            use_crc: cfg.crc.is_some(),
            payload: cfg.payload_positions()?,
            interleaver: InterleaverSpec::new(cfg.interleaver, &cfg.code, cfg.rnd_seed)?,
            decoder: ComponentDecoder::new(&cfg.code, &cfg.component_decoder())?,
            frames: VecDeque::with_capacity(cfg.window + 1),
            spare: None,
            next_index: 0,
            lam: LlrBlock::zeros(half, half),
            lam_target: LlrBlock::zeros(half, half),
            input: vec![0.0; 2 * half],
            result: SoftDecodeResult::new(2 * half),
            decodes_performed: 0,
            decodes_possible: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// `W + 1`.
    pub fn capacity(&self) -> usize {
        self.depth + 1
    }

    pub fn interleaver(&self) -> &InterleaverSpec {
        &self.interleaver
    }

    /// Absolute index of the frame at window position `k`.
    pub fn frame_index(&self, k: usize) -> u64 {
        self.frames[k].index
    }

    pub fn channel(&self, k: usize) -> &LlrBlock {
        &self.frames[k].channel
    }

    pub fn gamma(&self, k: usize) -> &LlrBlock {
        &self.frames[k].gamma
    }

    /// CRC status of the codewords of the frame at position `k`.
    pub fn crc_passed(&self, k: usize) -> &[bool] {
        &self.frames[k].crc_passed
    }

    pub fn skipped_last(&self, k: usize) -> &[bool] {
        &self.frames[k].skipped_last
    }

    /// Current new-bit estimates of the frame at position `k`.
    pub fn estimate(&self, k: usize) -> &BitMatrix {
        &self.frames[k].new_bits
    }

    pub fn decodes_performed(&self) -> u64 {
        self.decodes_performed
    }

    pub fn decodes_possible(&self) -> u64 {
        self.decodes_possible
    }

    /// Component decodes performed over decodes possible; 1 before any step.
    pub fn decoded_fraction(&self) -> f64 {
        if self.decodes_possible == 0 {
            1.0
        } else {
            self.decodes_performed as f64 / self.decodes_possible as f64
        }
    }

    /// Install a newly received frame. When the window is full the oldest
    /// frame is evicted first and its new bits are returned.
    pub fn push(&mut self, channel: &LlrBlock) -> Result<Option<BitMatrix>> {
        if channel.rows() != self.half || channel.cols() != self.half {
            return Err(Error::LengthMismatch {
                expected: self.half * self.half,
                actual: channel.rows() * channel.cols(),
            });
        }
        let evicted = self.evict_if_full();
        let mut f = self.fresh_frame();
        f.channel.as_mut_slice().copy_from_slice(channel.as_slice());
        self.frames.push_back(f);
        Ok(evicted)
    }

    /// Install the known all-zero first frame. Only valid before any push.
    pub fn push_genesis(&mut self) -> Result<()> {
        if self.next_index != 0 {
            return Err(Error::InvalidStaircase("genesis frame must come first".into()));
        }
        let mut f = self.fresh_frame();
        f.channel.fill(LLR_MAX);
        self.frames.push_back(f);
        Ok(())
    }

    /// Evict the oldest frame and return its new-bit estimates.
    pub fn pop(&mut self) -> Result<BitMatrix> {
        let f = self.frames.pop_front().ok_or(Error::EmptyWindow)?;
        let bits = f.new_bits.clone();
        self.spare = Some(f);
        Ok(bits)
    }

    fn evict_if_full(&mut self) -> Option<BitMatrix> {
        if self.frames.len() == self.capacity() {
            self.pop().ok()
        } else {
            None
        }
    }

    fn fresh_frame(&mut self) -> Frame {
        let mut f = self
            .spare
            .take()
            .unwrap_or_else(|| Frame::blank(self.half, self.payload.len()));
        f.reset(self.next_index);
        self.next_index += 1;
        f
    }

    /// Sweep the window from the newest frame to the oldest,
    /// `passes_per_frame` times. Does nothing with fewer than two frames.
    pub fn run_decoding_iteration(&mut self) {
        for _ in 0..self.passes {
            for k in (1..self.frames.len()).rev() {
                self.decoding_step(k);
            }
        }
    }

    /// Decode the codewords of frame `k - 1`, whose coupled half sits in
    /// frame `k`.
    fn decoding_step(&mut self, k: usize) {
        let m = self.half;
        let frames = self.frames.make_contiguous();
        let (head, tail) = frames.split_at_mut(k);
        let older = &mut head[k - 1];
        let newer = &mut tail[0];
        let dir = self.interleaver.decoder_direction(newer.index);

        for ((l, &c), &g) in self
            .lam
            .as_mut_slice()
            .iter_mut()
            .zip(newer.channel.as_slice())
            .zip(newer.gamma.as_slice())
        {
            *l = sat_add(c, g);
        }
        for r in 0..m {
            soft_transform_in_place(self.lam.row_mut(r));
        }
        self.interleaver.interleave_into(&self.lam, dir, &mut self.lam_target);

        for r in 0..m {
            self.decodes_possible += 1;
            if self.reduction
                && !apply_decoding_reduction(older.crc_passed[r], older.skipped_last[r]).decodes()
            {
                older.skipped_last[r] = true;
                continue;
            }
            older.skipped_last[r] = false;
            self.decodes_performed += 1;
            self.input[..m].copy_from_slice(self.lam_target.row(r));
            for ((x, &c), &g) in self.input[m..]
                .iter_mut()
                .zip(older.channel.row(r))
                .zip(older.gamma.row(r))
            {
                *x = sat_add(c, g);
            }
            self.decoder.decode(&self.input, &mut self.result);
            older.gamma.row_mut(r).copy_from_slice(&self.result.extrinsic[m..]);
            older.ext_left.row_mut(r).copy_from_slice(&self.result.extrinsic[..m]);
            for (b, &p) in older.new_bits.row_mut(r).iter_mut().zip(&self.payload) {
                *b = self.result.u_hat[p];
            }
            if self.use_crc {
                older.crc_passed[r] = self.result.crc_pass;
            }
        }

        if self.back_propagate {
            self.interleaver
                .interleave_into(&older.ext_left, dir.inverse(), &mut newer.gamma);
            for r in 0..m {
                soft_transform_in_place(newer.gamma.row_mut(r));
            }
        }
    }

    /// Hard decisions on the posterior `C + Γ` of the frame at position `k`.
    pub fn hard_frame(&self, k: usize) -> BitMatrix {
        let f = &self.frames[k];
        let data = f
            .channel
            .as_slice()
            .iter()
            .zip(f.gamma.as_slice())
            .map(|(&c, &g)| hard_decision(sat_add(c, g)))
            .collect();
        BitMatrix::from_vec(self.half, self.half, data).expect("square block")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{modulate_bit, sigma2_for};
    use crate::crc::CrcSpec;
    use crate::decoder::{Algorithm, DecoderConfig};
    use crate::polar::{Construction, PolarCodeSpec};
    use crate::staircase::{InterleaverKind, StaircaseEncoder};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(alg: Algorithm, kind: InterleaverKind, w: usize) -> StaircaseConfig {
        let code = PolarCodeSpec::staircase(4, 13, Construction::Bhattacharyya { erasure_prob: 0.3 }).unwrap();
        let mut c = StaircaseConfig::new(code, DecoderConfig::new(alg, 16));
        c.interleaver = kind;
        c.window = w;
        c
    }

    fn saturated(x: &BitMatrix) -> LlrBlock {
        LlrBlock::from_vec(x.rows(), x.cols(), x.as_slice().iter().map(|&b| modulate_bit(b) * LLR_MAX).collect()).unwrap()
    }

    #[test]
    fn reduction_rules() {
        assert_eq!(apply_decoding_reduction(false, false), ReductionDecision::Decode);
        assert_eq!(apply_decoding_reduction(false, true), ReductionDecision::Decode);
        assert_eq!(apply_decoding_reduction(true, false), ReductionDecision::Skip);
        assert_eq!(apply_decoding_reduction(true, true), ReductionDecision::ForcedDecode);
    }

    #[test]
    fn push_storage_and_capacity() {
        let c = cfg(Algorithm::Scan, InterleaverKind::Std, 2);
        let mut w = DecodingWindow::new(&c).unwrap();
        assert!(w.pop().is_err());
        let block = LlrBlock::from_fn(8, 8, |r, c| r as f64 - c as f64 * 0.5);
        assert!(w.push(&block).unwrap().is_none());
        assert_eq!(w.len(), 1);
        assert_eq!(w.channel(0), &block);
        assert!(w.gamma(0).as_slice().iter().all(|&g| g == 0.0));
        for i in 0..4 {
            let evicted = w.push(&block).unwrap();
            assert_eq!(evicted.is_some(), i >= 2);
        }
        assert_eq!(w.len(), 3);
        assert_eq!(w.frame_index(0), 2);
        assert!(w.push(&LlrBlock::zeros(4, 4)).is_err());
        assert!(w.push_genesis().is_err());
    }

    #[test]
    fn single_step_counts_decodes() {
        let c = cfg(Algorithm::Scan, InterleaverKind::PolTrs, 1);
        let mut w = DecodingWindow::new(&c).unwrap();
        w.push_genesis().unwrap();
        w.push(&LlrBlock::filled(8, 8, 1.0)).unwrap();
        w.run_decoding_iteration();
        assert_eq!(w.decodes_possible(), 8);
        assert_eq!(w.decodes_performed(), 8);
        assert_eq!(w.decoded_fraction(), 1.0);
    }

    #[test]
    fn reduction_state_machine_on_two_frames() {
        let mut c = cfg(Algorithm::SoftScl, InterleaverKind::PolFrz, 1);
        c.crc = Some(CrcSpec::CRC3);
        c.decoding_reduction = true;
        let mut enc = StaircaseEncoder::new(&c).unwrap();
        let mut w = DecodingWindow::new(&c).unwrap();
        let bits = BitMatrix::from_fn(8, c.new_bits_per_codeword(), |r, j| ((r + j) % 2) as u8);
        enc.encode_next_frame(&bits).unwrap();
        w.push_genesis().unwrap();
        let x1 = enc.encode_next_frame(&bits).unwrap();
        w.push(&saturated(&x1)).unwrap();
        w.run_decoding_iteration();
        assert!(w.crc_passed(0).iter().all(|&p| p));
        assert_eq!(w.decodes_performed(), 8);
        w.run_decoding_iteration();
        assert_eq!(w.decodes_performed(), 8);
        assert!(w.skipped_last(0).iter().all(|&s| s));
        w.run_decoding_iteration();
        assert_eq!(w.decodes_performed(), 16);
        assert!(w.skipped_last(0).iter().all(|&s| !s));
        assert_eq!(w.decodes_possible(), 24);
        assert_eq!(w.estimate(0), &bits);
    }

    fn round_trip(c: &StaircaseConfig, frames: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut enc = StaircaseEncoder::new(c).unwrap();
        let mut w = DecodingWindow::new(c).unwrap();
        let nb = c.new_bits_per_codeword();
        let mut sent = VecDeque::new();
        let mut errors = 0;
        let mut check = |out: BitMatrix, sent: &mut VecDeque<(bool, BitMatrix)>| {
            let (payload, truth) = sent.pop_front().unwrap();
            if payload {
                errors += out.hamming_distance(&truth);
            }
        };
        for t in 0..frames + c.window {
            let payload = t < frames;
            let bits = if payload {
                BitMatrix::from_fn(c.half(), nb, |_, _| rng.gen_range(0..2))
            } else {
                BitMatrix::zeros(c.half(), nb)
            };
            let x = enc.encode_next_frame(&bits).unwrap();
            sent.push_back((payload, bits));
            if t == 0 {
                w.push_genesis().unwrap();
            } else if let Some(out) = w.push(&saturated(&x)).unwrap() {
                check(out, &mut sent);
            }
            w.run_decoding_iteration();
        }
        while !w.is_empty() {
            let out = w.pop().unwrap();
            check(out, &mut sent);
        }
        errors
    }

    #[test]
    fn noiseless_round_trip_all_decoders_and_interleavers() {
        for alg in [Algorithm::SoftScl, Algorithm::Scan, Algorithm::Scanl] {
            for kind in [InterleaverKind::Std, InterleaverKind::PolTrs, InterleaverKind::PolFrz, InterleaverKind::PolRnd] {
                let c = cfg(alg, kind, 3);
                assert_eq!(round_trip(&c, 20, 5), 0, "{alg} {kind}");
            }
        }
    }

    #[test]
    fn noiseless_round_trip_with_crc_reduction_and_back_propagation() {
        let mut c = cfg(Algorithm::Scanl, InterleaverKind::PolRnd, 2);
        c.crc = Some(CrcSpec::CRC3);
        c.decoding_reduction = true;
        c.back_propagate = true;
        c.passes_per_frame = 2;
        assert_eq!(round_trip(&c, 15, 9), 0);
    }

    #[test]
    fn zero_transmission_under_mild_noise_decodes_to_zero() {
        let c = cfg(Algorithm::Scan, InterleaverKind::Std, 2);
        let mut w = DecodingWindow::new(&c).unwrap();
        let sigma2 = sigma2_for(6.0, c.effective_rate());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        w.push_genesis().unwrap();
        for _ in 0..6 {
            let llr = LlrBlock::from_fn(8, 8, |_, _| 2.0 * (1.0 + rng.gen_range(-0.9..0.9)) / sigma2);
            if let Some(out) = w.push(&llr).unwrap() {
                assert!(out.as_slice().iter().all(|&b| b == 0));
            }
            w.run_decoding_iteration();
            assert!(w.hard_frame(0).as_slice().iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn back_propagation_keeps_newest_gamma_zero_when_disabled() {
        let c = cfg(Algorithm::Scan, InterleaverKind::PolTrs, 2);
        let mut w = DecodingWindow::new(&c).unwrap();
        w.push_genesis().unwrap();
        w.push(&LlrBlock::filled(8, 8, 0.7)).unwrap();
        w.push(&LlrBlock::filled(8, 8, -0.4)).unwrap();
        w.run_decoding_iteration();
        assert!(w.gamma(2).as_slice().iter().all(|&g| g == 0.0));
        let mut c = c;
        c.back_propagate = true;
        let mut w = DecodingWindow::new(&c).unwrap();
        w.push_genesis().unwrap();
        w.push(&LlrBlock::filled(8, 8, 0.7)).unwrap();
        w.push(&LlrBlock::filled(8, 8, -0.4)).unwrap();
        w.run_decoding_iteration();
        assert!(w.gamma(2).as_slice().iter().any(|&g| g != 0.0));
    }
}
