//! C ABI over the polar-staircase codec and simulator.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `psc_*_new` function and released by the matching `psc_*_free`. Fallible
//! calls return a [`PscStatus`]; on failure the message is available from
//! [`psc_last_error_message`] on the same thread.

use polar_staircase::channel::{sigma2_for, transmit};
use polar_staircase::matrix::{BitMatrix, LlrBlock};
use polar_staircase::sim::{self, SimConfig};
use polar_staircase::staircase::{DecodingWindow, StaircaseConfig, StaircaseEncoder};
use polar_staircase::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes returned by fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    LengthMismatch = 4,
    InvalidState = 5,
    EmptyWindow = 6,
    Io = 7,
    Panic = 8,
}

/// Resolved simulation configuration.
pub struct PscConfig {
    inner: SimConfig,
}

/// Staircase encoder bound to one configuration and Eb/N0 design point.
pub struct PscEncoder {
    inner: StaircaseEncoder,
    half: usize,
    new_bits: usize,
}

/// Sliding-window staircase decoder.
pub struct PscWindow {
    inner: DecodingWindow,
    half: usize,
    new_bits: usize,
}

/// Seeded BPSK/AWGN channel.
pub struct PscChannel {
    rng: ChaCha8Rng,
    sigma2: f64,
}

/// Totals of one simulated Eb/N0 point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PscPointResult {
    pub ebn0_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frames: u64,
    pub frame_errors: u64,
    pub decodes_performed: u64,
    pub decodes_possible: u64,
    pub ber: f64,
    pub fer: f64,
    pub decoded_fraction: f64,
    pub wall_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> PscStatus {
    match e {
        Error::LengthMismatch { .. } => PscStatus::LengthMismatch,
        Error::EmptyWindow => PscStatus::EmptyWindow,
        Error::Io(_) => PscStatus::Io,
        Error::InvalidStaircase(_) => PscStatus::InvalidState,
        _ => PscStatus::InvalidConfig,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PscStatus, String)>) -> PscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PscStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside the library");
            PscStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PscStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PscStatus, String) {
    (PscStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (PscStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], (PscStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_len(expected: usize, actual: usize) -> Result<(), (PscStatus, String)> {
    if expected == actual {
        Ok(())
    } else {
        Err(lib_err(Error::LengthMismatch { expected, actual }))
    }
}

unsafe fn staircase(cfg: *const PscConfig, ebn0_db: f64) -> Result<StaircaseConfig, (PscStatus, String)> {
    let cfg = cfg.as_ref().ok_or_else(|| null("config"))?;
    cfg.inner.staircase_for(ebn0_db).map_err(lib_err)
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn psc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn psc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a TOML configuration. Missing keys take their defaults; an empty
/// string is the default configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn psc_config_from_toml(toml: *const c_char, out: *mut *mut PscConfig) -> PscStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| (PscStatus::InvalidUtf8, e.to_string()))?;
        let inner = SimConfig::from_toml_str(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PscConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`psc_config_from_toml`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psc_config_free(cfg: *mut PscConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// SHA-256 of the resolved configuration as 64 hex characters plus NUL.
/// Release with [`psc_string_free`].
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn psc_config_hash(cfg: *const PscConfig) -> *mut c_char {
    match cfg.as_ref() {
        Some(c) => CString::new(c.inner.hash()).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_last_error("config is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Half the component length, which is the side of every frame matrix.
///
/// # Safety
/// `cfg` must be null or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn psc_config_half(cfg: *const PscConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.inner.half())
}

/// Simulate one Eb/N0 point with the configured stop rule.
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_run_point(
    cfg: *const PscConfig,
    ebn0_db: f64,
    point_index: usize,
    out: *mut PscPointResult,
) -> PscStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("config"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = sim::run_point(&cfg.inner, ebn0_db, point_index).map_err(lib_err)?;
        *out = PscPointResult {
            ebn0_db: r.ebn0_db,
            bits: r.bits,
            bit_errors: r.bit_errors,
            frames: r.frames,
            frame_errors: r.frame_errors,
            decodes_performed: r.decodes_performed,
            decodes_possible: r.decodes_possible,
            ber: r.ber(),
            fer: r.fer(),
            decoded_fraction: r.decoded_fraction(),
            wall_s: r.wall_s,
        };
        Ok(())
    })
}

/// Create an encoder for the code constructed at `ebn0_db`.
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_encoder_new(cfg: *const PscConfig, ebn0_db: f64, out: *mut *mut PscEncoder) -> PscStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sc = staircase(cfg, ebn0_db)?;
        let inner = StaircaseEncoder::new(&sc).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PscEncoder {
            inner,
            half: sc.half(),
            new_bits: sc.new_bits_per_codeword(),
        }));
        Ok(())
    })
}

/// # Safety
/// `enc` must be null or a live encoder handle.
#[no_mangle]
pub unsafe extern "C" fn psc_encoder_free(enc: *mut PscEncoder) {
    if !enc.is_null() {
        drop(Box::from_raw(enc));
    }
}

/// New information bits per frame, `N/2` rows of payload bits.
///
/// # Safety
/// `enc` must be null or a live encoder handle.
#[no_mangle]
pub unsafe extern "C" fn psc_encoder_bits_per_frame(enc: *const PscEncoder) -> usize {
    enc.as_ref().map_or(0, |e| e.half * e.new_bits)
}

/// Encode one frame. `bits` holds `psc_encoder_bits_per_frame` bits, one per
/// byte, row-major by codeword; `out` receives `(N/2)^2` code bits.
///
/// # Safety
/// `enc` must be a live encoder; the buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn psc_encoder_encode(
    enc: *mut PscEncoder,
    bits: *const u8,
    bits_len: usize,
    out: *mut u8,
    out_len: usize,
) -> PscStatus {
    guard(|| {
        let enc = enc.as_mut().ok_or_else(|| null("encoder"))?;
        check_len(enc.half * enc.new_bits, bits_len)?;
        check_len(enc.half * enc.half, out_len)?;
        let bits = slice(bits, bits_len, "bits")?;
        let out = slice_mut(out, out_len, "out")?;
        let m = BitMatrix::from_vec(enc.half, enc.new_bits, bits.to_vec()).map_err(lib_err)?;
        let x = enc.inner.encode_next_frame(&m).map_err(lib_err)?;
        out.copy_from_slice(x.as_slice());
        Ok(())
    })
}

/// Create a decoding window for the code constructed at `ebn0_db`.
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_window_new(cfg: *const PscConfig, ebn0_db: f64, out: *mut *mut PscWindow) -> PscStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sc = staircase(cfg, ebn0_db)?;
        let inner = DecodingWindow::new(&sc).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PscWindow {
            inner,
            half: sc.half(),
            new_bits: sc.new_bits_per_codeword(),
        }));
        Ok(())
    })
}

/// # Safety
/// `win` must be null or a live window handle.
#[no_mangle]
pub unsafe extern "C" fn psc_window_free(win: *mut PscWindow) {
    if !win.is_null() {
        drop(Box::from_raw(win));
    }
}

/// Frames currently held.
///
/// # Safety
/// `win` must be null or a live window handle.
#[no_mangle]
pub unsafe extern "C" fn psc_window_len(win: *const PscWindow) -> usize {
    win.as_ref().map_or(0, |w| w.inner.len())
}

/// Install the known all-zero first frame in place of a received one.
///
/// # Safety
/// `win` must be a live window handle.
#[no_mangle]
pub unsafe extern "C" fn psc_window_push_genesis(win: *mut PscWindow) -> PscStatus {
    guard(|| {
        let win = win.as_mut().ok_or_else(|| null("window"))?;
        win.inner.push_genesis().map_err(lib_err)
    })
}

/// Install `(N/2)^2` channel LLRs. When the window was full the oldest
/// frame is evicted, its bits written to `evicted` and `*evicted_written`
/// set to 1; otherwise `*evicted_written` is 0 and `evicted` is untouched.
///
/// # Safety
/// `win` must be a live window; the buffers must hold the stated lengths and
/// `evicted_written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_window_push(
    win: *mut PscWindow,
    llr: *const f64,
    llr_len: usize,
    evicted: *mut u8,
    evicted_len: usize,
    evicted_written: *mut i32,
) -> PscStatus {
    guard(|| {
        let win = win.as_mut().ok_or_else(|| null("window"))?;
        let flag = evicted_written.as_mut().ok_or_else(|| null("evicted_written"))?;
        check_len(win.half * win.half, llr_len)?;
        check_len(win.half * win.new_bits, evicted_len)?;
        let llr = slice(llr, llr_len, "llr")?;
        let evicted = slice_mut(evicted, evicted_len, "evicted")?;
        let block = LlrBlock::from_vec(win.half, win.half, llr.to_vec()).map_err(lib_err)?;
        *flag = 0;
        if let Some(bits) = win.inner.push(&block).map_err(lib_err)? {
            evicted.copy_from_slice(bits.as_slice());
            *flag = 1;
        }
        Ok(())
    })
}

/// Run one decoding iteration over the window.
///
/// # Safety
/// `win` must be a live window handle.
#[no_mangle]
pub unsafe extern "C" fn psc_window_decode(win: *mut PscWindow) -> PscStatus {
    guard(|| {
        let win = win.as_mut().ok_or_else(|| null("window"))?;
        win.inner.run_decoding_iteration();
        Ok(())
    })
}

/// Evict the oldest frame and write its new-bit estimates.
///
/// # Safety
/// `win` must be a live window; `out` must hold `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn psc_window_pop(win: *mut PscWindow, out: *mut u8, out_len: usize) -> PscStatus {
    guard(|| {
        let win = win.as_mut().ok_or_else(|| null("window"))?;
        check_len(win.half * win.new_bits, out_len)?;
        let out = slice_mut(out, out_len, "out")?;
        let bits = win.inner.pop().map_err(lib_err)?;
        out.copy_from_slice(bits.as_slice());
        Ok(())
    })
}

/// Fraction of component decodes actually performed so far.
///
/// # Safety
/// `win` must be null or a live window handle.
#[no_mangle]
pub unsafe extern "C" fn psc_window_decoded_fraction(win: *const PscWindow) -> f64 {
    win.as_ref().map_or(0.0, |w| w.inner.decoded_fraction())
}

/// Create a seeded BPSK/AWGN channel at `ebn0_db` for code rate `rate`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_channel_new(ebn0_db: f64, rate: f64, seed: u64, out: *mut *mut PscChannel) -> PscStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !ebn0_db.is_finite() || !(rate > 0.0 && rate <= 1.0) {
            return Err((
                PscStatus::InvalidConfig,
                format!("Eb/N0 {ebn0_db} dB at rate {rate} is not a valid channel"),
            ));
        }
        *out = Box::into_raw(Box::new(PscChannel {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sigma2: sigma2_for(ebn0_db, rate),
        }));
        Ok(())
    })
}

/// # Safety
/// `ch` must be null or a live channel handle.
#[no_mangle]
pub unsafe extern "C" fn psc_channel_free(ch: *mut PscChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Transmit `len` bits and write their channel LLRs.
///
/// # Safety
/// `ch` must be a live channel; both buffers must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn psc_channel_transmit(ch: *mut PscChannel, bits: *const u8, llr: *mut f64, len: usize) -> PscStatus {
    guard(|| {
        let ch = ch.as_mut().ok_or_else(|| null("channel"))?;
        let bits = slice(bits, len, "bits")?;
        let llr = slice_mut(llr, len, "llr")?;
        transmit(bits, ch.sigma2, &mut ch.rng, llr);
        Ok(())
    })
}
