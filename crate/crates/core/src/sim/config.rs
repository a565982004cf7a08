use crate::crc::CrcSpec;
use crate::decoder::{default_k_max, Algorithm, DecoderConfig};
use crate::error::{Error, Result};
use crate::polar::{Construction, PolarCodeSpec};
use crate::staircase::{InterleaverKind, StaircaseConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Ga,
    Bhattacharyya,
}

/// Flat simulation configuration. Every field has a default, so an empty
/// file is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Component code length `N`.
    pub n: usize,
    /// Staircase rate `R`; the component dimension is `N/2 + round(R N/2)`.
    pub rate: f64,
    pub construction: ConstructionKind,
    /// Design Eb/N0 for the Gaussian approximation; defaults to each
    /// simulated point.
    pub design_ebn0_db: Option<f64>,
    pub erasure_prob: f64,

    pub window: usize,
    pub interleaver: InterleaverKind,
    pub rnd_seed: u64,
    /// CRC width in bits, 0 for none.
    pub crc_bits: usize,
    /// Explicit CRC generator, overriding the default for `crc_bits`.
    pub crc_poly: Option<u64>,
    pub passes_per_frame: usize,
    pub back_propagate: bool,
    pub decoding_reduction: bool,

    pub decoder: Algorithm,
    pub list_size: usize,
    pub iterations: usize,
    pub alpha_e: f64,
    pub alpha_b: f64,
    pub k_min: usize,
    pub k_max: Option<usize>,
    pub permutation_seed: u64,

    pub ebn0_db: Vec<f64>,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    pub seed: u64,
    /// Independent encoder/decoder chains per point.
    pub streams: usize,
    /// Payload frames each stream runs between stop-rule checks.
    pub frames_per_round: usize,
    /// Charge the CRC overhead in the Eb/N0 accounting.
    pub charge_crc: bool,
    /// Report wall-clock time; when false `wall_s` is written as 0.
    pub timing: bool,

    pub alpha_e_grid: Vec<f64>,
    pub alpha_b_grid: Vec<f64>,
    pub calibration_max_bits: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 128,
            rate: 0.875,
            construction: ConstructionKind::Ga,
            design_ebn0_db: None,
            erasure_prob: 0.5,
            window: 5,
            interleaver: InterleaverKind::PolFrz,
            rnd_seed: 0,
            crc_bits: 0,
            crc_poly: None,
            passes_per_frame: 1,
            back_propagate: true,
            decoding_reduction: false,
            decoder: Algorithm::SoftScl,
            list_size: 8,
            iterations: 1,
            alpha_e: 0.5,
            alpha_b: 0.5,
            k_min: 0,
            k_max: None,
            permutation_seed: 0,
            ebn0_db: vec![4.0],
            min_bit_errors: 200,
            max_bits: 10_000_000,
            seed: 1,
            streams: 4,
            frames_per_round: 4,
            charge_crc: true,
            timing: true,
            alpha_e_grid: vec![0.25, 0.5, 0.75, 1.0],
            alpha_b_grid: vec![0.25, 0.5, 0.75, 1.0],
            calibration_max_bits: 1_000_000,
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Resolved configuration as TOML, one key per line.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// SHA-256 of the resolved configuration, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// Component dimension `K`.
    pub fn dimension(&self) -> usize {
        self.half() + (self.rate * self.half() as f64).round() as usize
    }

    pub fn crc(&self) -> Result<Option<CrcSpec>> {
        match (self.crc_bits, self.crc_poly) {
            (0, None) => Ok(None),
            (_, Some(p)) => {
                let c = CrcSpec::from_poly(p)?;
                if self.crc_bits != 0 && c.width() != self.crc_bits {
                    return Err(Error::InvalidConfig(format!(
                        "crc_poly has degree {} but crc_bits = {}",
                        c.width(),
                        self.crc_bits
                    )));
                }
                Ok(Some(c))
            }
            (w, None) => CrcSpec::default_for_width(w as u32).map(Some),
        }
    }

    /// Rate used for the Eb/N0 to noise-variance conversion.
    pub fn accounting_rate(&self) -> Result<f64> {
        let m = self.half() as f64;
        let c = if self.charge_crc { self.crc()?.map_or(0, |c| c.width()) } else { 0 };
        Ok((self.dimension() as f64 - m - c as f64) / m)
    }

    /// Staircase configuration at a simulated Eb/N0.
    pub fn staircase_for(&self, ebn0_db: f64) -> Result<StaircaseConfig> {
        let log2 = self.n.trailing_zeros();
        let crc = self.crc()?;
        let construction = match self.construction {
            ConstructionKind::Ga => Construction::GaussianApprox {
                design_ebn0_db: self.design_ebn0_db.unwrap_or(ebn0_db),
                rate: self.accounting_rate()?,
            },
            ConstructionKind::Bhattacharyya => Construction::Bhattacharyya {
                erasure_prob: self.erasure_prob,
            },
        };
        let code = PolarCodeSpec::staircase(log2, self.dimension(), construction)?;
        let mut decoder = DecoderConfig::new(self.decoder, self.n);
        decoder.list_size = self.list_size;
        decoder.iterations = self.iterations;
        decoder.alpha_e = self.alpha_e;
        decoder.alpha_b = self.alpha_b;
        decoder.k_min = self.k_min;
        decoder.k_max = self.k_max.unwrap_or_else(|| default_k_max(self.n));
        decoder.permutation_seed = self.permutation_seed;
        let mut sc = StaircaseConfig::new(code, decoder);
        sc.window = self.window;
        sc.interleaver = self.interleaver;
        sc.rnd_seed = self.rnd_seed;
        sc.crc = crc;
        sc.passes_per_frame = self.passes_per_frame;
        sc.back_propagate = self.back_propagate;
        sc.decoding_reduction = self.decoding_reduction;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_power_of_two() || self.n > 1 << 16 {
            return Err(Error::InvalidConfig(format!("n = {} must be a power of two in 4..=65536", self.n)));
        }
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::InvalidConfig(format!("rate {} outside (0, 1)", self.rate)));
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidConfig("ebn0_db must list at least one point".into()));
        }
        if self.ebn0_db.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidConfig("ebn0_db points must be finite".into()));
        }
        if self.min_bit_errors == 0 || self.max_bits == 0 || self.calibration_max_bits == 0 {
            return Err(Error::InvalidConfig("stop-rule bounds must be positive".into()));
        }
        if self.streams == 0 || self.frames_per_round == 0 {
            return Err(Error::InvalidConfig("streams and frames_per_round must be positive".into()));
        }
        for a in self.alpha_e_grid.iter().chain(&self.alpha_b_grid) {
            if !(*a > 0.0 && *a <= 1.0) {
                return Err(Error::InvalidConfig(format!("calibration value {a} outside (0, 1]")));
            }
        }
        if self.accounting_rate()? <= 0.0 {
            return Err(Error::InvalidConfig("no new information bits per codeword".into()));
        }
        self.staircase_for(self.ebn0_db[0]).map(|_| ())
    }
}
