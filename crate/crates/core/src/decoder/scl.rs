//! LLR-based successive-cancellation list decoding.
//!
//! All paths are advanced together through the SC recursion. When paths
//! fork or are pruned at a leaf, each recursion level reorders its own
//! buffers once its child returns, using the ancestry map reported by the
//! child. This keeps the cost at `O(L N log N)` without lazy copying.

use crate::polar::kernel::{f_tilde, g_func, sat_add};
use crate::polar::{polar_transform_in_place, PolarCodeSpec};

/// One surviving candidate of a list decode.
#[derive(Debug, Clone, PartialEq)]
pub struct ListPath {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    pub metric: f64,
}

#[derive(Debug, Clone)]
pub struct SclDecoder {
    n: u32,
    list_size: usize,
    active: usize,
    /// `llr[s]` holds `list_size` slices of length `2^s`.
    llr: Vec<Vec<f64>>,
    beta: Vec<Vec<u8>>,
    metric: Vec<f64>,
    scratch_f: Vec<f64>,
    scratch_b: Vec<u8>,
    candidates: Vec<(f64, usize, u8)>,
}

impl SclDecoder {
    pub fn new(n: u32, list_size: usize) -> Self {
        assert!(list_size >= 1);
        let len = 1usize << n;
        SclDecoder {
            n,
            list_size,
            active: 0,
            llr: (0..=n).map(|s| vec![0.0; list_size << s]).collect(),
            beta: (0..=n).map(|s| vec![0; list_size << s]).collect(),
            metric: vec![0.0; list_size],
            scratch_f: vec![0.0; list_size * len],
            scratch_b: vec![0; list_size * len],
            candidates: Vec::with_capacity(2 * list_size),
        }
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    /// Run the list decoder; survivors are then read with [`Self::paths`] or
    /// [`Self::path_codeword`].
    pub fn run(&mut self, llr_in: &[f64], code: &PolarCodeSpec) {
        let n = self.n as usize;
        assert_eq!(llr_in.len(), 1 << n);
        self.active = 1;
        self.metric[0] = 0.0;
        self.llr[n][..llr_in.len()].copy_from_slice(llr_in);
        self.node(n, 0, code);
    }

    /// Number of surviving paths.
    pub fn survivors(&self) -> usize {
        self.active
    }

    pub fn path_metric(&self, p: usize) -> f64 {
        self.metric[p]
    }

    /// Re-encoded codeword estimate of path `p`.
    pub fn path_codeword(&self, p: usize) -> &[u8] {
        let len = 1 << self.n;
        &self.beta[self.n as usize][p * len..(p + 1) * len]
    }

    /// Survivors sorted by ascending path metric (ties keep path order).
    pub fn paths(&self) -> Vec<ListPath> {
        let mut out: Vec<ListPath> = (0..self.active)
            .map(|p| {
                let x_hat = self.path_codeword(p).to_vec();
                let mut u_hat = x_hat.clone();
                polar_transform_in_place(&mut u_hat);
                ListPath {
                    u_hat,
                    x_hat,
                    metric: self.metric[p],
                }
            })
            .collect();
        out.sort_by(|a, b| a.metric.total_cmp(&b.metric));
        out
    }

    fn node(&mut self, s: usize, offset: usize, code: &PolarCodeSpec) -> Option<Vec<usize>> {
        if s == 0 {
            return self.leaf(offset, code);
        }
        let h = 1usize << (s - 1);
        let w = 2 * h;
        {
            let (lower, upper) = self.llr.split_at_mut(s);
            let (parent, child) = (&upper[0], &mut lower[s - 1]);
            for p in 0..self.active {
                let par = &parent[p * w..(p + 1) * w];
                let ch = &mut child[p * h..(p + 1) * h];
                for i in 0..h {
                    ch[i] = f_tilde(par[i], par[i + h]);
                }
            }
        }
        let anc_left = self.node(s - 1, offset, code);
        if let Some(anc) = &anc_left {
            reorder(&mut self.llr[s], &mut self.scratch_f, anc, w);
        }
        {
            let (lower, upper) = self.beta.split_at_mut(s);
            let (parent, child) = (&mut upper[0], &lower[s - 1]);
            for p in 0..self.active {
                parent[p * w..p * w + h].copy_from_slice(&child[p * h..(p + 1) * h]);
            }
        }
        {
            let (lower, upper) = self.llr.split_at_mut(s);
            let (parent, child) = (&upper[0], &mut lower[s - 1]);
            let left = &self.beta[s];
            for p in 0..self.active {
                let par = &parent[p * w..(p + 1) * w];
                let bl = &left[p * w..p * w + h];
                let ch = &mut child[p * h..(p + 1) * h];
                for i in 0..h {
                    ch[i] = g_func(par[i], par[i + h], bl[i]);
                }
            }
        }
        let anc_right = self.node(s - 1, offset + h, code);
        if let Some(anc) = &anc_right {
            reorder(&mut self.beta[s], &mut self.scratch_b, anc, w);
        }
        {
            let (lower, upper) = self.beta.split_at_mut(s);
            let (parent, child) = (&mut upper[0], &lower[s - 1]);
            for p in 0..self.active {
                let par = &mut parent[p * w..(p + 1) * w];
                let br = &child[p * h..(p + 1) * h];
                for i in 0..h {
                    par[i] ^= br[i];
                    par[i + h] = br[i];
                }
            }
        }
        match (anc_left, anc_right) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(b.iter().map(|&q| a[q]).collect()),
        }
    }

    /// Decide one input bit on every path. Returns the ancestry map when the
    /// path set changed.
    fn leaf(&mut self, i: usize, code: &PolarCodeSpec) -> Option<Vec<usize>> {
        if code.is_frozen(i) {
            for p in 0..self.active {
                let l = self.llr[0][p];
                if l < 0.0 {
                    self.metric[p] = sat_add(self.metric[p], -l);
                }
                self.beta[0][p] = 0;
            }
            return None;
        }
        self.candidates.clear();
        for p in 0..self.active {
            let l = self.llr[0][p];
            let pm = self.metric[p];
            let (pm0, pm1) = if l < 0.0 {
                (sat_add(pm, -l), pm)
            } else {
                (pm, sat_add(pm, l))
            };
            self.candidates.push((pm0, p, 0));
            self.candidates.push((pm1, p, 1));
        }
        if self.candidates.len() > self.list_size {
            self.candidates.sort_by(|a, b| {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
            });
            self.candidates.truncate(self.list_size);
            self.candidates.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)));
        }
        let anc: Vec<usize> = self.candidates.iter().map(|c| c.1).collect();
        for (q, &(pm, _, bit)) in self.candidates.iter().enumerate() {
            self.metric[q] = pm;
            self.beta[0][q] = bit;
        }
        self.active = self.candidates.len();
        Some(anc)
    }
}

/// `buf[p] <- buf[anc[p]]` for slices of width `w`.
fn reorder<T: Copy>(buf: &mut [T], scratch: &mut [T], anc: &[usize], w: usize) {
    for (p, &a) in anc.iter().enumerate() {
        scratch[p * w..(p + 1) * w].copy_from_slice(&buf[a * w..(a + 1) * w]);
    }
    let n = anc.len() * w;
    buf[..n].copy_from_slice(&scratch[..n]);
}

/// One-shot list decode; survivors sorted by ascending path metric.
pub fn scl_decode(llr_in: &[f64], code: &PolarCodeSpec, list_size: usize) -> Vec<ListPath> {
    let mut dec = SclDecoder::new(code.log2_len(), list_size);
    dec.run(llr_in, code);
    dec.paths()
}
