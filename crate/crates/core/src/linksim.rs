//! Uncoded QPSK link over a cyclic multipath channel with AWGN.
//!
//! The channel is a circular convolution over one frame, so every system sees
//! the same per-bin diagonal model `Y[f] = H[f]·X[f] + W[f]` without any
//! cyclic-prefix handling. Receivers:
//!
//! * OFDM: per-bin zero forcing; bins at a spectral null are zeroed.
//! * VOFDM: per-bin MMSE `H*·Y / (|H|² + σ²)` over the whole frame, then `V^H`.
//! * GFDM: the same per-bin MMSE, then zero-forcing demodulation `A^{-1}`.
//!
//! Each frame draws bits and noise from its own ChaCha8 stream selected by
//! `(seed, frame index)`, so frames can run in parallel and the totals are
//! identical to a sequential run.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{dim_err, param_err, Result};
use crate::fft::UnitaryFft;
use crate::gfdm::{GfdmConfig, GfdmModulator, ZeroForcingReceiver};
use crate::linalg::ComplexVector;
use crate::vofdm::{VofdmConfig, VofdmModulator};

/// Channel bins with `|H| <= NULL_THRESHOLD·max|H|` count as spectral nulls.
pub const NULL_THRESHOLD: f64 = 1e-12;

/// Gray-mapped, unit-energy QPSK: `(b0, b1) -> ((1-2b0) + i(1-2b1))/√2`.
pub fn qpsk_map(bits: &[bool]) -> Result<ComplexVector> {
    if !bits.len().is_multiple_of(2) {
        return param_err(format!("QPSK needs an even number of bits, got {}", bits.len()));
    }
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let level = |b: bool| if b { -a } else { a };
    ComplexVector::new(
        bits.chunks_exact(2)
            .map(|p| Complex64::new(level(p[0]), level(p[1])))
            .collect(),
    )
}

/// Sign decisions; a component of exactly zero decides for bit 0.
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<bool> {
    symbols.iter().flat_map(|z| [z.re < 0.0, z.im < 0.0]).collect()
}

/// Channel impulse response applied as a circular convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    taps: ComplexVector,
    description: String,
}

impl ChannelSpec {
    pub fn new(taps: ComplexVector, description: impl Into<String>) -> Result<Self> {
        if taps.iter().all(|z| z.norm() == 0.0) {
            return param_err("channel needs at least one nonzero tap");
        }
        Ok(Self {
            taps,
            description: description.into(),
        })
    }

    pub fn identity() -> Self {
        Self::new(ComplexVector::from_real(&[1.0]).expect("one tap"), "identity").expect("nonzero")
    }

    /// `[1, 1]/√2`, which has an exact zero at bin `N/2` for even `N`.
    pub fn two_tap_null() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            ComplexVector::from_real(&[a, a]).expect("two taps"),
            "two-tap [1,1]/sqrt(2), spectral null at N/2",
        )
        .expect("nonzero")
    }

    pub fn taps(&self) -> &ComplexVector {
        &self.taps
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Unnormalized `n`-point DFT of the zero-padded taps.
    pub fn frequency_response(&self, n: usize) -> Result<Vec<Complex64>> {
        self.check_len(n)?;
        let mut padded = vec![Complex64::new(0.0, 0.0); n];
        padded[..self.taps.len()].copy_from_slice(&self.taps);
        let fft = UnitaryFft::new(n);
        fft.forward_in_place(&mut padded);
        let scale = (n as f64).sqrt();
        Ok(padded.into_iter().map(|z| z * scale).collect())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.taps.len() > n {
            return dim_err(format!(
                "channel has {} taps but the frame is only {n} samples",
                self.taps.len()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// Circular convolution of `x` with the channel taps.
pub fn apply_channel(x: &[Complex64], ch: &ChannelSpec) -> Result<ComplexVector> {
    let n = x.len();
    ch.check_len(n)?;
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for (j, tap) in ch.taps.iter().enumerate() {
        for (i, out) in y.iter_mut().enumerate() {
            *out += tap * x[(i + n - j) % n];
        }
    }
    ComplexVector::new(y)
}

/// Per-sample noise variance `E_s / 10^(snr/10)` with `E_s = ‖x‖²/N`.
/// Zero for an infinite SNR.
pub fn noise_variance(x: &[Complex64], snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let es = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64;
    es / 10f64.powf(snr_db / 10.0)
}

/// Adds circular complex Gaussian noise at the given SNR.
pub fn awgn(x: &[Complex64], snr_db: f64, rng: &mut impl Rng) -> ComplexVector {
    let variance = noise_variance(x, snr_db);
    ComplexVector::from_vec(add_noise(x, variance, rng))
}

fn add_noise(x: &[Complex64], variance: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    if variance == 0.0 {
        return x.to_vec();
    }
    let sigma = (variance / 2.0).sqrt();
    x.iter()
        .map(|z| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            z + Complex64::new(re, im) * sigma
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Ofdm,
    Vofdm,
    Gfdm,
}

impl SystemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemKind::Ofdm => "ofdm",
            SystemKind::Vofdm => "vofdm",
            SystemKind::Gfdm => "gfdm",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Transmission scheme under test.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkSystem {
    /// Plain OFDM, i.e. VOFDM with `M = 1`.
    Ofdm { subcarriers: usize },
    Vofdm(VofdmConfig),
    Gfdm(GfdmConfig),
}

impl LinkSystem {
    pub fn kind(&self) -> SystemKind {
        match self {
            LinkSystem::Ofdm { .. } => SystemKind::Ofdm,
            LinkSystem::Vofdm(_) => SystemKind::Vofdm,
            LinkSystem::Gfdm(_) => SystemKind::Gfdm,
        }
    }

    pub fn frame_len(&self) -> usize {
        match self {
            LinkSystem::Ofdm { subcarriers } => *subcarriers,
            LinkSystem::Vofdm(cfg) => cfg.frame_len(),
            LinkSystem::Gfdm(cfg) => cfg.block_len(),
        }
    }

    pub fn receiver_description(&self) -> &'static str {
        match self {
            LinkSystem::Ofdm { .. } => "per-bin zero forcing, nulled bins zeroed",
            LinkSystem::Vofdm(_) => "per-bin MMSE over the frame, then V^H",
            LinkSystem::Gfdm(_) => "per-bin MMSE over the frame, then zero-forcing A^-1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub system: SystemKind,
    pub snr_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub seed: u64,
}

enum Transceiver {
    Ofdm(UnitaryFft),
    Vofdm(VofdmModulator),
    Gfdm(GfdmModulator, ZeroForcingReceiver),
}

impl Transceiver {
    fn new(system: &LinkSystem) -> Result<Self> {
        Ok(match system {
            LinkSystem::Ofdm { subcarriers } => {
                if *subcarriers == 0 {
                    return param_err("OFDM needs at least one subcarrier");
                }
                Transceiver::Ofdm(UnitaryFft::new(*subcarriers))
            }
            LinkSystem::Vofdm(cfg) => Transceiver::Vofdm(VofdmModulator::new(*cfg)),
            LinkSystem::Gfdm(cfg) => {
                let modulator = GfdmModulator::new(cfg.clone());
                let zf = modulator.zero_forcing()?;
                Transceiver::Gfdm(modulator, zf)
            }
        })
    }

    fn modulate(&self, d: &[Complex64]) -> Result<ComplexVector> {
        match self {
            Transceiver::Ofdm(fft) => Ok(fft.inverse(d)),
            Transceiver::Vofdm(v) => v.modulate(d),
            Transceiver::Gfdm(g, _) => g.modulate_vec(d),
        }
    }
}

struct Link {
    transceiver: Transceiver,
    fft: UnitaryFft,
    response: Vec<Complex64>,
    null_level: f64,
}

impl Link {
    fn receive(&self, r: &[Complex64], variance: f64) -> Result<ComplexVector> {
        let mut spectrum = r.to_vec();
        self.fft.forward_in_place(&mut spectrum);
        let mmse = !matches!(self.transceiver, Transceiver::Ofdm(_));
        for (y, h) in spectrum.iter_mut().zip(&self.response) {
            let nulled = h.norm() <= self.null_level;
            *y = if mmse && variance > 0.0 {
                h.conj() * *y / (h.norm_sqr() + variance)
            } else if nulled {
                Complex64::new(0.0, 0.0)
            } else {
                *y / h
            };
        }
        match &self.transceiver {
            Transceiver::Ofdm(_) => Ok(ComplexVector::from_vec(spectrum)),
            Transceiver::Vofdm(v) => {
                self.fft.inverse_in_place(&mut spectrum);
                v.demodulate(&spectrum)
            }
            Transceiver::Gfdm(_, zf) => {
                self.fft.inverse_in_place(&mut spectrum);
                zf.equalize(&spectrum)
            }
        }
    }

    fn run_frame(&self, ch: &ChannelSpec, snr_db: f64, seed: u64, frame: u64) -> Result<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(frame);
        let n = self.response.len();
        let bits: Vec<bool> = (0..2 * n).map(|_| rng.random()).collect();
        let x = self.transceiver.modulate(&qpsk_map(&bits)?)?;
        let y = apply_channel(&x, ch)?;
        let variance = noise_variance(&y, snr_db);
        let r = add_noise(&y, variance, &mut rng);
        let decided = qpsk_demap(&self.receive(&r, variance)?);
        Ok(bits.iter().zip(&decided).filter(|(a, b)| a != b).count() as u64)
    }
}

/// Simulates `n_frames` independent frames and counts bit errors.
pub fn run_ber(
    system: &LinkSystem,
    ch: &ChannelSpec,
    snr_db: f64,
    n_frames: usize,
    seed: u64,
) -> Result<BerResult> {
    if n_frames == 0 {
        return param_err("need at least one frame");
    }
    if snr_db.is_nan() {
        return param_err("SNR must be a number");
    }
    let n = system.frame_len();
    let response = ch.frequency_response(n)?;
    let peak = response.iter().map(|h| h.norm()).fold(0.0, f64::max);
    let link = Link {
        transceiver: Transceiver::new(system)?,
        fft: UnitaryFft::new(n),
        response,
        null_level: NULL_THRESHOLD * peak,
    };
    let bit_errors = (0..n_frames as u64)
        .into_par_iter()
        .map(|frame| link.run_frame(ch, snr_db, seed, frame))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let bits_sent = (2 * n * n_frames) as u64;
    Ok(BerResult {
        system: system.kind(),
        snr_db,
        bits_sent,
        bit_errors,
        ber: bit_errors as f64 / bits_sent as f64,
        seed,
    })
}
