use clap::{Args, Parser, Subcommand};
use polar_staircase::channel::{sigma2_for, transmit};
use polar_staircase::matrix::BitMatrix;
use polar_staircase::polar::q_function;
use polar_staircase::sim::{self, SimConfig};
use polar_staircase::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polar-staircase", version, about = "BER simulation of polar staircase codes over BPSK/AWGN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every configured Eb/N0 point and write one CSV row per point.
    Sweep(Common),
    /// Search the (alpha_e, alpha_b) grid at one Eb/N0 point.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Point to calibrate at; defaults to the first configured point.
        #[arg(long)]
        ebn0: Option<f64>,
    },
    /// Quick end-to-end checks of the encoder, decoders and channel.
    Selftest(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(p) => SimConfig::from_file(p)?,
            None => SimConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(polar_staircase::Error::InvalidConfig("--threads must be positive".into()));
            }
            b = b.num_threads(t);
        }
        b.build()
            .map_err(|e| polar_staircase::Error::InvalidConfig(e.to_string()))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep(common) => {
            let cfg = common.load()?;
            let pool = common.pool()?;
            let mut rows = Vec::new();
            for (i, &e) in cfg.ebn0_db.iter().enumerate() {
                let row = pool.install(|| {
                    sim::run_point_with(&cfg, e, i, cfg.max_bits, &mut |p| {
                        eprint!("\r{:>6.2} dB  {:>12} bits  {:>8} errors", p.ebn0_db, p.bits, p.bit_errors);
                    })
                })?;
                eprintln!("\r{:>6.2} dB  BER {:.3e}  FER {:.3e}          ", e, row.ber(), row.fer());
                rows.push(row);
            }
            sim::write_csv(&cfg, &rows, common.output()?)?;
            Ok(true)
        }
        Command::Calibrate { common, ebn0 } => {
            let cfg = common.load()?;
            let pool = common.pool()?;
            let point = ebn0.unwrap_or(cfg.ebn0_db[0]);
            let grid = sim::calibration_grid(&cfg);
            let cal = pool.install(|| sim::calibrate_alphas(&cfg, point, &grid))?;
            eprintln!("best alpha_e = {}, alpha_b = {}", cal.best.0, cal.best.1);
            sim::write_calibration_csv(&cfg, &cal, common.output()?)?;
            Ok(true)
        }
        Command::Selftest(common) => {
            let cfg = common.load()?;
            let pool = common.pool()?;
            let mut buf = Vec::new();
            let ok = pool.install(|| selftest(&cfg, &mut buf))?;
            common.output()?.write_all(&buf)?;
            Ok(ok)
        }
    }
}

fn report(out: &mut dyn Write, name: &str, ok: bool, detail: String) -> Result<bool> {
    writeln!(out, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" })?;
    Ok(ok)
}

fn selftest(cfg: &SimConfig, out: &mut dyn Write) -> Result<bool> {
    let mut all = true;

    let noiseless = SimConfig {
        ebn0_db: vec![40.0],
        max_bits: 50_000,
        min_bit_errors: 1,
        timing: false,
        ..cfg.clone()
    };
    let r = sim::run_point(&noiseless, 40.0, 0)?;
    all &= report(out, "noiseless", r.bit_errors == 0, format!("{} errors in {} bits", r.bit_errors, r.bits))?;

    let ebn0 = 4.0;
    let sigma2 = sigma2_for(ebn0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let zeros = BitMatrix::zeros(1, 1 << 16);
    let mut llr = vec![0.0; zeros.cols()];
    let (mut errors, mut bits) = (0u64, 0u64);
    while errors < 200 {
        transmit(zeros.as_slice(), sigma2, &mut rng, &mut llr);
        errors += llr.iter().filter(|&&l| l < 0.0).count() as u64;
        bits += llr.len() as u64;
    }
    let measured = errors as f64 / bits as f64;
    let theory = q_function((2.0 * 10f64.powf(ebn0 / 10.0)).sqrt());
    let rel = (measured / theory - 1.0).abs();
    all &= report(
        out,
        "uncoded_bpsk_4db",
        rel < 0.15,
        format!("measured {measured:.3e}, theory {theory:.3e}"),
    )?;
    Ok(all)
}
