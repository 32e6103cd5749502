//! Frequency-domain structure of GFDM and VOFDM transmit signals.
//!
//! Every structural property is reduced to a max-abs error (or an energy
//! fraction) that can be compared against a fixed tolerance:
//!
//! * VOFDM, one populated row `r` of the `M×L` data matrix: the spectrum is
//!   `M` copies of an `L`-bin pattern, copy `j+1` equal to copy `j` times
//!   `exp(-2πi·r/M)`.
//! * VOFDM, one symbol: the `M` spectral lines it occupies are spread evenly
//!   over the band, so every window of `L` consecutive bins holds `L/N` of the
//!   energy.
//! * GFDM, one symbol at `(k, m)`: `|X[f]| = |G[f - kM]| / √K` where `G` is
//!   the pulse spectrum. Moving to subcarrier `k+1` shifts the window by `M`
//!   bins.
//! * GFDM, one populated subcarrier: the `M`-periodic spectrum of the
//!   subcarrier's data, multiplied by the shifted pulse window.
//!
//! All spectra use the unitary FFT, so Parseval holds without scaling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param_err, Result};
use crate::fft::fft;
use crate::gfdm::{self, GfdmConfig, GfdmModulator};
use crate::linalg::{max_abs_diff, ComplexVector};
use crate::vofdm::{self, VofdmConfig, VofdmModulator};

/// Bins weaker than this fraction of the peak are skipped when comparing phases.
pub const PHASE_MAGNITUDE_FLOOR: f64 = 1e-6;

/// Spectrum of one transmit frame plus whichever structural metrics the
/// producing check computed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub bins: ComplexVector,
    pub magnitude: Vec<f64>,
    pub repetition_error: Option<f64>,
    /// Largest phase deviation in radians between successive spectral copies.
    pub phase_ramp_error: Option<f64>,
    /// Largest deviation of `|X[f]|` from the constant `1/√N`.
    pub flatness_error: Option<f64>,
    /// Largest deviation of any `L`-bin window energy from `L/N`.
    pub window_spread_error: Option<f64>,
    /// Largest deviation of `|X|` from the shifted pulse window.
    pub window_error: Option<f64>,
    pub inband_energy_fraction: Option<f64>,
}

impl SpectrumReport {
    pub fn from_signal(x: &[Complex64]) -> Self {
        let bins = fft(x);
        let magnitude = bins.iter().map(|z| z.norm()).collect();
        Self {
            bins,
            magnitude,
            repetition_error: None,
            phase_ramp_error: None,
            flatness_error: None,
            window_spread_error: None,
            window_error: None,
            inband_energy_fraction: None,
        }
    }

    pub fn energy(&self) -> f64 {
        self.magnitude.iter().map(|m| m * m).sum()
    }

    /// `|Σ|X|² - ‖x‖²|` against the time-domain signal.
    pub fn parseval_error(&self, x: &[Complex64]) -> f64 {
        let time: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        (self.energy() - time).abs()
    }

    /// Energy fraction in `len` bins starting at `start`, wrapping around.
    pub fn window_energy_fraction(&self, start: usize, len: usize) -> f64 {
        let n = self.magnitude.len();
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let inside: f64 = (0..len.min(n))
            .map(|j| self.magnitude[(start + j) % n].powi(2))
            .sum();
        inside / total
    }

    /// Flat `(name, value)` pairs for the metrics that are present.
    pub fn metrics(&self) -> Vec<(&'static str, f64)> {
        [
            ("repetition_error", self.repetition_error),
            ("phase_ramp_error", self.phase_ramp_error),
            ("flatness_error", self.flatness_error),
            ("window_spread_error", self.window_spread_error),
            ("window_error", self.window_error),
            ("inband_energy_fraction", self.inband_energy_fraction),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
        .collect()
    }
}

fn vofdm_single_row(cfg: VofdmConfig, row: usize, row_data: &[Complex64]) -> Vec<Complex64> {
    let m = cfg.block_len();
    let mut d = vec![Complex64::new(0.0, 0.0); cfg.frame_len()];
    for (c, z) in row_data.iter().enumerate() {
        d[c * m + row] = *z;
    }
    d
}

/// Modulates a VOFDM frame with only `row` populated and measures the
/// spectral repetition law `X[f+L] = X[f]·exp(-2πi·row/M)`.
pub fn check_vofdm_repetition(
    cfg: VofdmConfig,
    row: usize,
    row_data: &[Complex64],
) -> Result<SpectrumReport> {
    let (m, l, n) = (cfg.block_len(), cfg.num_blocks(), cfg.frame_len());
    if row >= m {
        return param_err(format!("row {row} out of range for M={m}"));
    }
    if row_data.len() != l {
        return param_err(format!("row data must have L={l} entries, got {}", row_data.len()));
    }
    if row_data.iter().all(|z| z.norm() == 0.0) {
        return param_err("row data is all zero");
    }
    let d = vofdm_single_row(cfg, row, row_data);
    let x = VofdmModulator::new(cfg).modulate(&d)?;
    let mut report = SpectrumReport::from_signal(&x);

    let rotation = Complex64::from_polar(1.0, -2.0 * PI * row as f64 / m as f64);
    let bins = &report.bins;
    let peak = report.magnitude.iter().copied().fold(0.0, f64::max);
    let mut repetition = 0.0f64;
    let mut phase = 0.0f64;
    for f in 0..n {
        let next = bins[(f + l) % n];
        repetition = repetition.max((next - bins[f] * rotation).norm());
        if report.magnitude[f] > PHASE_MAGNITUDE_FLOOR * peak {
            phase = phase.max((next * bins[f].conj() * rotation.conj()).arg().abs());
        }
    }
    report.repetition_error = Some(repetition);
    report.phase_ramp_error = Some(phase);
    // each of the M copies carries the same energy
    report.inband_energy_fraction = Some(report.window_energy_fraction(0, l));
    Ok(report)
}

/// Spectrum of a single VOFDM symbol `e_index`.
///
/// `flatness_error` measures the deviation from a constant `1/√N` magnitude.
/// `window_spread_error` measures how far any `L` consecutive bins are from
/// holding exactly `L/N` of the energy. Rejects `M = 1`, where the symbol is
/// a single OFDM subcarrier.
pub fn check_symbol_spread(cfg: VofdmConfig, symbol_index: usize) -> Result<SpectrumReport> {
    let (m, l, n) = (cfg.block_len(), cfg.num_blocks(), cfg.frame_len());
    if m < 2 {
        return param_err("symbol spreading needs M >= 2; with M = 1 a symbol is one subcarrier");
    }
    if symbol_index >= n {
        return param_err(format!("symbol index {symbol_index} out of range for N={n}"));
    }
    let d = ComplexVector::unit(n, symbol_index)?;
    let x = VofdmModulator::new(cfg).modulate(&d)?;
    let mut report = SpectrumReport::from_signal(&x);

    let flat = 1.0 / (n as f64).sqrt();
    report.flatness_error = Some(
        report
            .magnitude
            .iter()
            .map(|a| (a - flat).abs())
            .fold(0.0, f64::max),
    );
    let share = l as f64 / n as f64;
    report.window_spread_error = Some(
        (0..n)
            .map(|start| (report.window_energy_fraction(start, l) - share).abs())
            .fold(0.0, f64::max),
    );
    report.inband_energy_fraction = Some(report.window_energy_fraction(0, l));
    Ok(report)
}

fn pulse_spectrum(modulator: &GfdmModulator) -> ComplexVector {
    fft(modulator.pulse())
}

/// Energy fraction of a GFDM subcarrier window: the `2M` bins centered on
/// bin `kM`, i.e. `kM - M .. kM + M - 1` modulo `N` (capped at `N` bins).
pub fn gfdm_inband_window(cfg: &GfdmConfig, k: usize) -> (usize, usize) {
    let (m, n) = (cfg.subsymbols(), cfg.block_len());
    ((k * m + n - m % n) % n, (2 * m).min(n))
}

/// Modulates a single unit symbol at subcarrier `k`, subsymbol `m` and
/// compares its magnitude spectrum with the pulse window shifted to `kM`.
pub fn check_gfdm_window(cfg: &GfdmConfig, k: usize, m: usize) -> Result<SpectrumReport> {
    let (kk, mm, n) = (cfg.subcarriers(), cfg.subsymbols(), cfg.block_len());
    if k >= kk || m >= mm {
        return param_err(format!("symbol ({k},{m}) out of range for K={kk}, M={mm}"));
    }
    let modulator = GfdmModulator::new(cfg.clone());
    let x = modulator.modulate_vec(&ComplexVector::unit(n, m * kk + k)?)?;
    let mut report = SpectrumReport::from_signal(&x);

    let g = pulse_spectrum(&modulator);
    let scale = 1.0 / (kk as f64).sqrt();
    report.window_error = Some(
        (0..n)
            .map(|f| (report.magnitude[f] - g[(f + n - (k * mm) % n) % n].norm() * scale).abs())
            .fold(0.0, f64::max),
    );
    let (start, len) = gfdm_inband_window(cfg, k);
    report.inband_energy_fraction = Some(report.window_energy_fraction(start, len));
    Ok(report)
}

/// Modulates a GFDM block with only subcarrier `k` populated and checks
/// `X[f] = G[φ]·P[φ mod M]/√K` with `φ = f - kM` and `P` the unnormalized
/// `M`-point DFT of the subcarrier's data.
pub fn check_gfdm_row_repetition(
    cfg: &GfdmConfig,
    k: usize,
    row_data: &[Complex64],
) -> Result<SpectrumReport> {
    let (kk, mm, n) = (cfg.subcarriers(), cfg.subsymbols(), cfg.block_len());
    if k >= kk {
        return param_err(format!("subcarrier {k} out of range for K={kk}"));
    }
    if row_data.len() != mm {
        return param_err(format!("row data must have M={mm} entries, got {}", row_data.len()));
    }
    let modulator = GfdmModulator::new(cfg.clone());
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for (m, z) in row_data.iter().enumerate() {
        d[m * kk + k] = *z;
    }
    let x = modulator.modulate_vec(&d)?;
    let mut report = SpectrumReport::from_signal(&x);

    let g = pulse_spectrum(&modulator);
    let periodic: Vec<Complex64> = (0..mm)
        .map(|j| {
            row_data
                .iter()
                .enumerate()
                .map(|(m, z)| z * Complex64::from_polar(1.0, -2.0 * PI * ((j * m) % mm) as f64 / mm as f64))
                .sum()
        })
        .collect();
    let scale = 1.0 / (kk as f64).sqrt();
    report.repetition_error = Some(
        (0..n)
            .map(|f| {
                let phi = (f + n - (k * mm) % n) % n;
                (report.bins[f] - g[phi] * periodic[phi % mm] * scale).norm()
            })
            .fold(0.0, f64::max),
    );
    let (start, len) = gfdm_inband_window(cfg, k);
    report.inband_energy_fraction = Some(report.window_energy_fraction(start, len));
    Ok(report)
}

/// Largest deviation of the GFDM window for subcarrier `k+1` from the window
/// for `k` rotated by `M` bins, over all `k` and the given subsymbol.
pub fn gfdm_window_shift_error(cfg: &GfdmConfig, m: usize) -> Result<f64> {
    let (kk, mm, n) = (cfg.subcarriers(), cfg.subsymbols(), cfg.block_len());
    let mut worst = 0.0f64;
    for k in 0..kk {
        let here = check_gfdm_window(cfg, k, m)?.magnitude;
        let next = check_gfdm_window(cfg, (k + 1) % kk, m)?.magnitude;
        for f in 0..n {
            worst = worst.max((next[(f + mm) % n] - here[f]).abs());
        }
    }
    Ok(worst)
}

/// VOFDM symbols in adjacent rows of the same column differ by a one-sample
/// delay, i.e. `X_{r+1}[f] = X_r[f]·exp(-2πi·f/N)`. Returns the largest
/// violation of that law and the largest magnitude difference.
pub fn vofdm_row_shift_error(cfg: VofdmConfig) -> Result<(f64, f64)> {
    let (m, n) = (cfg.block_len(), cfg.frame_len());
    let modulator = VofdmModulator::new(cfg);
    let mut ramp = 0.0f64;
    let mut magnitude = 0.0f64;
    for col in 0..cfg.num_blocks() {
        for r in 0..m.saturating_sub(1) {
            let x0 = modulator.modulate(&ComplexVector::unit(n, col * m + r)?)?;
            let x1 = modulator.modulate(&ComplexVector::unit(n, col * m + r + 1)?)?;
            let (s0, s1) = (fft(&x0), fft(&x1));
            for f in 0..n {
                let expected = s0[f] * Complex64::from_polar(1.0, -2.0 * PI * f as f64 / n as f64);
                ramp = ramp.max((s1[f] - expected).norm());
                magnitude = magnitude.max((s1[f].norm() - s0[f].norm()).abs());
            }
        }
    }
    Ok((ramp, magnitude))
}

/// Energy that a single-row VOFDM frame puts on samples outside its
/// stride-`M` lattice, maximized over rows.
pub fn vofdm_interleave_leakage(cfg: VofdmConfig, rng: &mut impl Rng) -> Result<f64> {
    let m = cfg.block_len();
    let modulator = VofdmModulator::new(cfg);
    let mut worst = 0.0f64;
    for row in 0..m {
        let data = random_symbols(rng, cfg.num_blocks());
        let x = modulator.modulate(&vofdm_single_row(cfg, row, &data))?;
        let off: f64 = x
            .iter()
            .enumerate()
            .filter(|(n, _)| n % m != row)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        worst = worst.max(off);
    }
    Ok(worst)
}

fn random_symbols(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Direction of the comparison in a [`Check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    /// Error metric: passes when `value <= limit`.
    AtMost,
    /// Fraction or score: passes when `value >= limit`.
    AtLeast,
}

/// One named, thresholded measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub kind: Limit,
}

impl Check {
    pub fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, kind: Limit::AtMost }
    }

    pub fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, kind: Limit::AtLeast }
    }

    pub fn passes(&self) -> bool {
        match self.kind {
            Limit::AtMost => self.value <= self.limit,
            Limit::AtLeast => self.value >= self.limit,
        }
    }
}

/// Tolerances used by the verification suite.
pub mod tolerance {
    pub const REPETITION: f64 = 1e-9;
    pub const PHASE_RAMP: f64 = 1e-9;
    pub const GFDM_WINDOW: f64 = 1e-9;
    pub const GFDM_WINDOW_SHIFT: f64 = 1e-9;
    pub const SPREAD: f64 = 1e-10;
    pub const ROW_SHIFT: f64 = 1e-10;
    pub const INTERLEAVE: f64 = 1e-12;
    pub const PARSEVAL: f64 = 1e-9;
    pub const FAST_DENSE: f64 = 1e-10;
    /// A raised-cosine pulse has no energy outside ±M bins of its subcarrier
    /// center, so the in-band fraction is 1 up to rounding.
    pub const GFDM_INBAND_MIN: f64 = 1.0 - 1e-9;
}

/// One row of the GFDM / VOFDM comparison table with the checks backing it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub aspect: &'static str,
    pub gfdm: &'static str,
    pub vofdm: &'static str,
    pub checks: Vec<Check>,
}

impl ComparisonRow {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(ComparisonRow::passes)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.rows.iter().flat_map(|r| r.checks.iter())
    }
}

/// Computes the GFDM / VOFDM comparison, one row per structural aspect.
/// Both configurations must have the same frame length. Test data is drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn comparison_table(vcfg: VofdmConfig, gcfg: &GfdmConfig, seed: u64) -> Result<ComparisonTable> {
    if vcfg.frame_len() != gcfg.block_len() {
        return param_err(format!(
            "frame lengths differ: VOFDM N={}, GFDM N={}",
            vcfg.frame_len(),
            gcfg.block_len()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vofdm_rep = 0.0f64;
    let mut vofdm_phase = 0.0f64;
    for row in 0..vcfg.block_len() {
        let data = random_symbols(&mut rng, vcfg.num_blocks());
        let r = check_vofdm_repetition(vcfg, row, &data)?;
        vofdm_rep = vofdm_rep.max(r.repetition_error.unwrap_or(0.0));
        vofdm_phase = vofdm_phase.max(r.phase_ramp_error.unwrap_or(0.0));
    }
    let mut gfdm_rep = 0.0f64;
    for k in 0..gcfg.subcarriers() {
        let data = random_symbols(&mut rng, gcfg.subsymbols());
        let r = check_gfdm_row_repetition(gcfg, k, &data)?;
        gfdm_rep = gfdm_rep.max(r.repetition_error.unwrap_or(0.0));
    }

    let mut gfdm_window = 0.0f64;
    let mut gfdm_inband = 1.0f64;
    for k in 0..gcfg.subcarriers() {
        for m in 0..gcfg.subsymbols() {
            let r = check_gfdm_window(gcfg, k, m)?;
            gfdm_window = gfdm_window.max(r.window_error.unwrap_or(0.0));
            gfdm_inband = gfdm_inband.min(r.inband_energy_fraction.unwrap_or(0.0));
        }
    }
    let mut spread = 0.0f64;
    if vcfg.block_len() >= 2 {
        for s in 0..vcfg.frame_len() {
            spread = spread.max(check_symbol_spread(vcfg, s)?.window_spread_error.unwrap_or(0.0));
        }
    }

    let mut shift = 0.0f64;
    for m in 0..gcfg.subsymbols() {
        shift = shift.max(gfdm_window_shift_error(gcfg, m)?);
    }
    let (row_ramp, row_magnitude) = vofdm_row_shift_error(vcfg)?;
    let leakage = vofdm_interleave_leakage(vcfg, &mut rng)?;

    Ok(ComparisonTable {
        rows: vec![
            ComparisonRow {
                aspect: "frequency domain structure",
                gfdm: "spectrum repetition for each data matrix row",
                vofdm: "spectrum repetition for each data matrix row",
                checks: vec![
                    Check::at_most("gfdm_row_repetition_error", gfdm_rep, tolerance::REPETITION),
                    Check::at_most("vofdm_row_repetition_error", vofdm_rep, tolerance::REPETITION),
                    Check::at_most("vofdm_phase_ramp_error", vofdm_phase, tolerance::PHASE_RAMP),
                ],
            },
            ComparisonRow {
                aspect: "frequency domain window",
                gfdm: "localized (sparse) filter",
                vofdm: "rectangular of full bandwidth",
                checks: vec![
                    Check::at_most("gfdm_window_error", gfdm_window, tolerance::GFDM_WINDOW),
                    Check::at_least("gfdm_inband_energy_fraction", gfdm_inband, tolerance::GFDM_INBAND_MIN),
                    Check::at_most("vofdm_spread_window_error", spread, tolerance::SPREAD),
                ],
            },
            ComparisonRow {
                aspect: "filter change row to row",
                gfdm: "circular shift by one subcarrier",
                vofdm: "multiplication with complex exponential of increasing frequency",
                checks: vec![
                    Check::at_most("gfdm_window_shift_error", shift, tolerance::GFDM_WINDOW_SHIFT),
                    Check::at_most("vofdm_row_shift_ramp_error", row_ramp, tolerance::ROW_SHIFT),
                    Check::at_most("vofdm_row_shift_magnitude_error", row_magnitude, tolerance::ROW_SHIFT),
                ],
            },
            ComparisonRow {
                aspect: "localization",
                gfdm: "localized in time and frequency",
                vofdm: "interleaved in time and frequency",
                checks: vec![Check::at_most("vofdm_interleave_leakage", leakage, tolerance::INTERLEAVE)],
            },
        ],
    })
}

/// The full verification suite: the comparison table followed by Parseval
/// and fast-versus-dense modulator checks on seeded random data.
pub fn verification_suite(vcfg: VofdmConfig, gcfg: &GfdmConfig, seed: u64) -> Result<Vec<Check>> {
    let table = comparison_table(vcfg, gcfg, seed)?;
    let mut checks: Vec<Check> = table.checks().cloned().collect();

    // separate stream so adding table checks does not perturb these
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    let d = random_symbols(&mut rng, vcfg.frame_len());
    let xv = VofdmModulator::new(vcfg).modulate(&d)?;
    let xv_dense = vofdm::modulation_matrix(vcfg).mul_vec(&d)?;
    let dg = random_symbols(&mut rng, gcfg.block_len());
    let xg = GfdmModulator::new(gcfg.clone()).modulate_vec(&dg)?;
    let xg_dense = gfdm::modulation_matrix(gcfg).mul_vec(&dg)?;

    checks.push(Check::at_most(
        "vofdm_parseval_error",
        SpectrumReport::from_signal(&xv).parseval_error(&xv),
        tolerance::PARSEVAL,
    ));
    checks.push(Check::at_most(
        "gfdm_parseval_error",
        SpectrumReport::from_signal(&xg).parseval_error(&xg),
        tolerance::PARSEVAL,
    ));
    checks.push(Check::at_most("vofdm_fast_dense_error", max_abs_diff(&xv, &xv_dense), tolerance::FAST_DENSE));
    checks.push(Check::at_most("gfdm_fast_dense_error", max_abs_diff(&xg, &xg_dense), tolerance::FAST_DENSE));
    Ok(checks)
}
