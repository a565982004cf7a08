use super::SimConfig;
use crate::channel::{sigma2_for, transmit, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, LlrBlock};
use crate::staircase::{DecodingWindow, StaircaseConfig, StaircaseEncoder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::VecDeque;
use std::io::Write;
use std::time::Instant;

/// How per-stream generators are derived from the configured seed.
pub const SEED_SPLIT: &str = "ChaCha8Rng::seed_from_u64(seed), stream = (point_index << 32) | stream_index";

pub const CSV_HEADER: &str = "ebn0_db,bits,bit_errors,ber,frames,frame_errors,fer,decoded_fraction,wall_s";

/// Totals for one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointResult {
    pub ebn0_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frames: u64,
    pub frame_errors: u64,
    pub decodes_performed: u64,
    pub decodes_possible: u64,
    pub wall_s: f64,
}

impl PointResult {
    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits)
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn decoded_fraction(&self) -> f64 {
        if self.decodes_possible == 0 {
            1.0
        } else {
            ratio(self.decodes_performed, self.decodes_possible)
        }
    }

    fn absorb(&mut self, s: &Tally) {
        self.bits += s.bits;
        self.bit_errors += s.bit_errors;
        self.frames += s.frames;
        self.frame_errors += s.frame_errors;
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6e},{},{},{:.6e},{:.6},{:.3}",
            self.ebn0_db,
            self.bits,
            self.bit_errors,
            self.ber(),
            self.frames,
            self.frame_errors,
            self.fer(),
            self.decoded_fraction(),
            self.wall_s
        )
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Running totals reported after every round of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub ebn0_db: f64,
    pub rounds: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frames: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    bits: u64,
    bit_errors: u64,
    frames: u64,
    frame_errors: u64,
}

/// One encoder, channel and window decoder chain.
struct Stream {
    encoder: StaircaseEncoder,
    window: DecodingWindow,
    rng: ChaCha8Rng,
    sigma2: f64,
    half: usize,
    new_bits: usize,
    depth: usize,
    sent: VecDeque<Option<BitMatrix>>,
    llr: LlrBlock,
    tally: Tally,
}

impl Stream {
    fn new(sc: &StaircaseConfig, sigma2: f64, seed: u64, point: u64, index: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((point << 32) | index);
        Ok(Stream {
            encoder: StaircaseEncoder::new(sc)?,
            window: DecodingWindow::new(sc)?,
            rng,
            sigma2,
            half: sc.half(),
            new_bits: sc.new_bits_per_codeword(),
            depth: sc.window,
            sent: VecDeque::with_capacity(sc.window + 2),
            llr: LlrBlock::zeros(sc.half(), sc.half()),
            tally: Tally::default(),
        })
    }

    fn step(&mut self, payload: bool) -> Result<()> {
        let bits = if payload {
            let rng = &mut self.rng;
            BitMatrix::from_fn(self.half, self.new_bits, |_, _| rng.gen::<u8>() & 1)
        } else {
            BitMatrix::zeros(self.half, self.new_bits)
        };
        let x = self.encoder.encode_next_frame(&bits)?;
        self.sent.push_back(payload.then_some(bits));
        if self.encoder.counter() == 1 {
            self.window.push_genesis()?;
        } else {
            transmit(x.as_slice(), self.sigma2, &mut self.rng, self.llr.as_mut_slice());
            if let Some(out) = self.window.push(&self.llr)? {
                self.count(&out);
            }
        }
        self.window.run_decoding_iteration();
        Ok(())
    }

    fn count(&mut self, out: &BitMatrix) {
        if let Some(Some(truth)) = self.sent.pop_front() {
            let e = out.hamming_distance(&truth) as u64;
            self.tally.bits += (truth.rows() * truth.cols()) as u64;
            self.tally.bit_errors += e;
            self.tally.frames += 1;
            self.tally.frame_errors += u64::from(e > 0);
        }
    }

    /// Send `W` all-zero flush frames, then drain the window.
    fn finish(&mut self) -> Result<()> {
        for _ in 0..self.depth {
            self.step(false)?;
        }
        while !self.window.is_empty() {
            let out = self.window.pop()?;
            self.count(&out);
        }
        Ok(())
    }
}

/// Simulate one Eb/N0 point with the configured stop rule.
pub fn run_point(cfg: &SimConfig, ebn0_db: f64, point_index: usize) -> Result<PointResult> {
    run_point_with(cfg, ebn0_db, point_index, cfg.max_bits, &mut |_| {})
}

/// As [`run_point`], with an explicit bit budget and a callback invoked
/// after every round.
pub fn run_point_with(
    cfg: &SimConfig,
    ebn0_db: f64,
    point_index: usize,
    max_bits: u64,
    observer: &mut dyn FnMut(&Progress),
) -> Result<PointResult> {
    cfg.validate()?;
    let start = Instant::now();
    let sc = cfg.staircase_for(ebn0_db)?;
    let sigma2 = sigma2_for(ebn0_db, cfg.accounting_rate()?);
    let mut streams = (0..cfg.streams as u64)
        .map(|i| Stream::new(&sc, sigma2, cfg.seed, point_index as u64, i))
        .collect::<Result<Vec<_>>>()?;
    let fpr = cfg.frames_per_round;
    let mut rounds = 0u64;
    loop {
        streams
            .par_iter_mut()
            .try_for_each(|s| (0..fpr).try_for_each(|_| s.step(true)))?;
        rounds += 1;
        let total = streams.iter().fold(PointResult::default(), |mut acc, s| {
            acc.absorb(&s.tally);
            acc
        });
        observer(&Progress {
            ebn0_db,
            rounds,
            bits: total.bits,
            bit_errors: total.bit_errors,
            frames: total.frames,
        });
        if total.bit_errors >= cfg.min_bit_errors || total.bits >= max_bits {
            break;
        }
    }
    streams.par_iter_mut().try_for_each(|s| s.finish())?;
    let mut result = PointResult {
        ebn0_db,
        ..PointResult::default()
    };
    for s in &streams {
        result.absorb(&s.tally);
        result.decodes_performed += s.window.decodes_performed();
        result.decodes_possible += s.window.decodes_possible();
    }
    if cfg.timing {
        result.wall_s = start.elapsed().as_secs_f64();
    }
    Ok(result)
}

/// Run every configured point in order.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    cfg.ebn0_db
        .iter()
        .enumerate()
        .map(|(i, &e)| run_point(cfg, e, i))
        .collect()
}

/// Provenance comment lines placed before the CSV header.
pub fn csv_preamble(cfg: &SimConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("# polar-staircase {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("# config_hash = {}\n", cfg.hash()));
    s.push_str(&format!("# rng = {RNG_ALGORITHM}\n"));
    s.push_str(&format!("# seed_split = {SEED_SPLIT}\n"));
    for line in cfg.to_toml().lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s
}

pub fn write_csv<W: Write>(cfg: &SimConfig, rows: &[PointResult], mut out: W) -> Result<()> {
    out.write_all(csv_preamble(cfg).as_bytes())?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCell {
    pub alpha_e: f64,
    pub alpha_b: f64,
    pub result: PointResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub best: (f64, f64),
    pub table: Vec<CalibrationCell>,
}

/// Reduced-budget run per `(alpha_e, alpha_b)` cell; the lowest BER wins,
/// ties go to the larger `alpha_e`, then the larger `alpha_b`.
pub fn calibrate_alphas(cfg: &SimConfig, ebn0_db: f64, grid: &[(f64, f64)]) -> Result<Calibration> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("calibration grid is empty".into()));
    }
    let mut table = Vec::with_capacity(grid.len());
    for &(alpha_e, alpha_b) in grid {
        let cell = SimConfig {
            alpha_e,
            alpha_b,
            ..cfg.clone()
        };
        let result = run_point_with(&cell, ebn0_db, 0, cfg.calibration_max_bits, &mut |_| {})?;
        table.push(CalibrationCell {
            alpha_e,
            alpha_b,
            result,
        });
    }
    let best = table
        .iter()
        .min_by(|a, b| {
            a.result
                .ber()
                .total_cmp(&b.result.ber())
                .then(b.alpha_e.total_cmp(&a.alpha_e))
                .then(b.alpha_b.total_cmp(&a.alpha_b))
        })
        .map(|c| (c.alpha_e, c.alpha_b))
        .expect("non-empty grid");
    Ok(Calibration { best, table })
}

/// Grid from the configured value lists. Decoders without a path metric
/// scaling use the configured `alpha_b` alone.
pub fn calibration_grid(cfg: &SimConfig) -> Vec<(f64, f64)> {
    let bs = if cfg.decoder == crate::decoder::Algorithm::SoftScl {
        cfg.alpha_b_grid.clone()
    } else {
        vec![cfg.alpha_b]
    };
    cfg.alpha_e_grid
        .iter()
        .flat_map(|&e| bs.iter().map(move |&b| (e, b)))
        .collect()
}

pub fn write_calibration_csv<W: Write>(cfg: &SimConfig, cal: &Calibration, mut out: W) -> Result<()> {
    out.write_all(csv_preamble(cfg).as_bytes())?;
    writeln!(out, "# best = alpha_e {}, alpha_b {}", cal.best.0, cal.best.1)?;
    writeln!(out, "alpha_e,alpha_b,{CSV_HEADER}")?;
    for c in &cal.table {
        writeln!(out, "{},{},{}", c.alpha_e, c.alpha_b, c.result.csv_row())?;
    }
    out.flush()?;
    Ok(())
}
