//! Successive-cancellation decoding with min-sum `f` and partial sums.

use crate::polar::kernel::{f_tilde, g_func, hard_decision};
use crate::polar::{polar_transform_in_place, PolarCodeSpec};

/// Reusable SC decoder; per-level scratch is allocated once.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: u32,
    llr: Vec<Vec<f64>>,
    beta: Vec<Vec<u8>>,
}

impl ScDecoder {
    pub fn new(n: u32) -> Self {
        ScDecoder {
            n,
            llr: (0..=n).map(|s| vec![0.0; 1 << s]).collect(),
            beta: (0..=n).map(|s| vec![0; 1 << s]).collect(),
        }
    }

    /// Decode into `(u_hat, x_hat)`.
    pub fn decode(&mut self, llr_in: &[f64], code: &PolarCodeSpec) -> (Vec<u8>, Vec<u8>) {
        assert_eq!(llr_in.len(), 1 << self.n);
        self.llr[self.n as usize].copy_from_slice(llr_in);
        self.node(self.n as usize, 0, code);
        let x_hat = self.beta[self.n as usize].clone();
        let mut u_hat = x_hat.clone();
        polar_transform_in_place(&mut u_hat);
        (u_hat, x_hat)
    }

    fn node(&mut self, s: usize, offset: usize, code: &PolarCodeSpec) {
        if s == 0 {
            self.beta[0][0] = if code.is_frozen(offset) {
                0
            } else {
                hard_decision(self.llr[0][0])
            };
            return;
        }
        let h = 1 << (s - 1);
        {
            let (lower, upper) = self.llr.split_at_mut(s);
            let (parent, child) = (&upper[0], &mut lower[s - 1]);
            for i in 0..h {
                child[i] = f_tilde(parent[i], parent[i + h]);
            }
        }
        self.node(s - 1, offset, code);
        {
            let (lower, upper) = self.beta.split_at_mut(s);
            upper[0][..h].copy_from_slice(&lower[s - 1]);
        }
        {
            let (lower, upper) = self.llr.split_at_mut(s);
            let (parent, child) = (&upper[0], &mut lower[s - 1]);
            let left = &self.beta[s];
            for i in 0..h {
                child[i] = g_func(parent[i], parent[i + h], left[i]);
            }
        }
        self.node(s - 1, offset + h, code);
        let (lower, upper) = self.beta.split_at_mut(s);
        let (parent, right) = (&mut upper[0], &lower[s - 1]);
        for i in 0..h {
            parent[i] ^= right[i];
            parent[i + h] = right[i];
        }
    }
}

/// One-shot SC decode returning `(u_hat, x_hat)`.
pub fn sc_decode(llr_in: &[f64], code: &PolarCodeSpec) -> (Vec<u8>, Vec<u8>) {
    ScDecoder::new(code.log2_len()).decode(llr_in, code)
}
