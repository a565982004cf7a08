//! Soft cancellation (SCAN): iterative message passing on the polar factor
//! graph following the SC schedule.
//!
//! Messages are stored per tree level: level `s` holds, for every node of
//! size `2^s`, the LLRs entering the node from its parent (`lam`) and the
//! soft partial sums it returns (`beta`). Level `n` is the channel side and
//! level 0 the input side.

use super::{crc_layout, DecoderConfig, SoftDecodeResult};
use crate::crc::CrcLayout;
use crate::error::Result;
use crate::polar::kernel::{f_tilde, sat_add, LLR_MAX};
use crate::polar::{polar_transform_in_place, PolarCodeSpec};

#[derive(Debug, Clone)]
pub struct ScanDecoder {
    n: u32,
    iterations: usize,
    alpha_e: f64,
    frozen: Vec<bool>,
    crc: Option<CrcLayout>,
    lam: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
}

impl ScanDecoder {
    pub fn new(code: &PolarCodeSpec, cfg: &DecoderConfig) -> Result<Self> {
        Ok(Self::with_frozen(
            code.log2_len(),
            code.frozen_mask().to_vec(),
            cfg.iterations,
            cfg.alpha_e,
            crc_layout(code, cfg.crc)?,
        ))
    }

    pub(crate) fn with_frozen(
        n: u32,
        frozen: Vec<bool>,
        iterations: usize,
        alpha_e: f64,
        crc: Option<CrcLayout>,
    ) -> Self {
        let len = 1usize << n;
        ScanDecoder {
            n,
            iterations,
            alpha_e,
            frozen,
            crc,
            lam: vec![vec![0.0; len]; n as usize + 1],
            beta: vec![vec![0.0; len]; n as usize + 1],
        }
    }

    /// Run the message passing only; results are read from the accessors.
    pub fn run(&mut self, llr_in: &[f64]) {
        let n = self.n as usize;
        assert_eq!(llr_in.len(), 1 << n);
        for s in 0..n {
            self.lam[s].fill(0.0);
        }
        for s in 1..=n {
            self.beta[s].fill(0.0);
        }
        self.lam[n].copy_from_slice(llr_in);
        for (b, &f) in self.beta[0].iter_mut().zip(&self.frozen) {
            *b = if f { LLR_MAX } else { 0.0 };
        }
        for _ in 0..self.iterations {
            self.node(n, 0);
        }
    }

    /// Input-side messages `lambda_0` after the last iteration.
    pub fn input_llr(&self) -> &[f64] {
        &self.lam[0]
    }

    /// Input-side priors `beta_0`.
    pub fn input_prior(&self) -> &[f64] {
        &self.beta[0]
    }

    /// Channel-side output `beta_n` (unscaled).
    pub fn output_beta(&self) -> &[f64] {
        &self.beta[self.n as usize]
    }

    /// Channel-side input `lambda_n`.
    pub fn channel_llr(&self) -> &[f64] {
        &self.lam[self.n as usize]
    }

    /// Hard decision on `lambda_0 + beta_0` (0 when non-negative).
    pub fn hard_input(&self, u: &mut [u8]) {
        for ((u, &l), &b) in u.iter_mut().zip(&self.lam[0]).zip(&self.beta[0]) {
            *u = u8::from(sat_add(l, b) < 0.0);
        }
    }

    pub fn decode(&mut self, llr_in: &[f64], out: &mut SoftDecodeResult) {
        self.run(llr_in);
        self.hard_input(&mut out.u_hat);
        out.x_hat.copy_from_slice(&out.u_hat);
        polar_transform_in_place(&mut out.x_hat);
        let a = self.alpha_e;
        for (e, &b) in out.extrinsic.iter_mut().zip(&self.beta[self.n as usize]) {
            *e = a * b;
        }
        out.crc_pass = self.crc.as_ref().is_some_and(|c| c.passes(&out.u_hat));
        out.selected_metric = 0.0;
    }

    fn node(&mut self, s: usize, o: usize) {
        if s == 0 {
            return;
        }
        let h = 1usize << (s - 1);
        {
            let (lower, upper) = self.lam.split_at_mut(s);
            let (parent, child) = (&upper[0][o..o + 2 * h], &mut lower[s - 1]);
            let right_beta = &self.beta[s - 1][o + h..o + 2 * h];
            for i in 0..h {
                child[o + i] = f_tilde(parent[i], sat_add(parent[i + h], right_beta[i]));
            }
        }
        self.node(s - 1, o);
        {
            let (lower, upper) = self.lam.split_at_mut(s);
            let (parent, child) = (&upper[0][o..o + 2 * h], &mut lower[s - 1]);
            let left_beta = &self.beta[s - 1][o..o + h];
            for i in 0..h {
                child[o + h + i] = sat_add(parent[i + h], f_tilde(parent[i], left_beta[i]));
            }
        }
        self.node(s - 1, o + h);
        let parent_lam = &self.lam[s][o..o + 2 * h];
        let (lower, upper) = self.beta.split_at_mut(s);
        let (parent, child) = (&mut upper[0][o..o + 2 * h], &lower[s - 1][o..o + 2 * h]);
        for i in 0..h {
            let (bl, br) = (child[i], child[i + h]);
            parent[i] = f_tilde(bl, sat_add(parent_lam[i + h], br));
            parent[i + h] = sat_add(br, f_tilde(bl, parent_lam[i]));
        }
    }
}

/// One-shot SCAN decode.
pub fn scan_decode(llr_in: &[f64], code: &PolarCodeSpec, iterations: usize, alpha_e: f64) -> SoftDecodeResult {
    let mut dec = ScanDecoder::with_frozen(
        code.log2_len(),
        code.frozen_mask().to_vec(),
        iterations.max(1),
        alpha_e,
        None,
    );
    let mut out = SoftDecodeResult::new(code.len());
    dec.decode(llr_in, &mut out);
    out
}
