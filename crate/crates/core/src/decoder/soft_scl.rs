//! Soft-output SCL: extrinsic LLRs from the path-metric gaps between
//! survivors that disagree on a codeword bit.

use super::{crc_layout, DecoderConfig, SclDecoder, SoftDecodeResult};
use crate::crc::CrcLayout;
use crate::error::Result;
use crate::polar::kernel::saturate;
use crate::polar::{polar_transform_in_place, PolarCodeSpec};

#[derive(Debug, Clone)]
pub struct SoftSclDecoder {
    code: PolarCodeSpec,
    list: SclDecoder,
    alpha_e: f64,
    alpha_b: f64,
    k_min: usize,
    k_max: usize,
    crc: Option<CrcLayout>,
    magnitudes: Vec<f64>,
    u_scratch: Vec<u8>,
}

impl SoftSclDecoder {
    pub fn new(code: &PolarCodeSpec, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate(code.len())?;
        Ok(SoftSclDecoder {
            code: code.clone(),
            list: SclDecoder::new(code.log2_len(), cfg.list_size),
            alpha_e: cfg.alpha_e,
            alpha_b: cfg.alpha_b,
            k_min: cfg.k_min,
            k_max: cfg.k_max,
            crc: crc_layout(code, cfg.crc)?,
            magnitudes: vec![0.0; code.len()],
            u_scratch: vec![0; code.len()],
        })
    }

    /// Sum of the `k_min..=k_max` smallest input magnitudes.
    fn no_competitor_reliability(&mut self, llr_in: &[f64]) -> f64 {
        for (m, l) in self.magnitudes.iter_mut().zip(llr_in) {
            *m = l.abs();
        }
        let k_max = self.k_max.min(self.magnitudes.len() - 1);
        let (head, nth, _) = self.magnitudes.select_nth_unstable_by(k_max, f64::total_cmp);
        let nth = *nth;
        head.sort_unstable_by(f64::total_cmp);
        head[self.k_min.min(k_max)..].iter().sum::<f64>() + if self.k_min <= k_max { nth } else { 0.0 }
    }

    pub fn decode(&mut self, llr_in: &[f64], out: &mut SoftDecodeResult) {
        let len = self.code.len();
        self.list.run(llr_in, &self.code);
        let survivors = self.list.survivors();

        // candidate selection: lowest metric, CRC-passing first when configured
        let mut best: Option<usize> = None;
        let mut best_crc: Option<usize> = None;
        for p in 0..survivors {
            let m = self.list.path_metric(p);
            if best.map_or(true, |b| m < self.list.path_metric(b)) {
                best = Some(p);
            }
            if let Some(crc) = &self.crc {
                if best_crc.map_or(true, |b| m < self.list.path_metric(b)) {
                    self.u_scratch.copy_from_slice(self.list.path_codeword(p));
                    polar_transform_in_place(&mut self.u_scratch);
                    if crc.passes(&self.u_scratch) {
                        best_crc = Some(p);
                    }
                }
            }
        }
        let selected = best_crc.or(best).expect("list decoder keeps at least one path");
        out.crc_pass = best_crc.is_some();
        out.selected_metric = self.list.path_metric(selected);
        out.x_hat.copy_from_slice(self.list.path_codeword(selected));
        out.u_hat.copy_from_slice(&out.x_hat);
        polar_transform_in_place(&mut out.u_hat);

        let agree_reliability = self.no_competitor_reliability(llr_in);
        for i in 0..len {
            let mut min0 = f64::INFINITY;
            let mut min1 = f64::INFINITY;
            for p in 0..survivors {
                let m = self.list.path_metric(p);
                if self.list.path_codeword(p)[i] == 0 {
                    min0 = min0.min(m);
                } else {
                    min1 = min1.min(m);
                }
            }
            let lambda = llr_in[i];
            out.extrinsic[i] = if min0.is_finite() && min1.is_finite() {
                saturate(self.alpha_e * (self.alpha_b * (min1 - min0) - lambda))
            } else {
                let magnitude = (self.alpha_e * (self.alpha_b * agree_reliability - lambda)).max(0.0);
                let magnitude = saturate(magnitude);
                if min0.is_finite() {
                    magnitude
                } else {
                    -magnitude
                }
            };
        }
    }
}

/// One-shot soft-SCL decode.
pub fn soft_scl_decode(llr_in: &[f64], code: &PolarCodeSpec, cfg: &DecoderConfig) -> Result<SoftDecodeResult> {
    let mut dec = SoftSclDecoder::new(code, cfg)?;
    let mut out = SoftDecodeResult::new(code.len());
    dec.decode(llr_in, &mut out);
    Ok(out)
}
