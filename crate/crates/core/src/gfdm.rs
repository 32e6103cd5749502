//! Generalized frequency division multiplexing.
//!
//! A block of `K` subcarriers by `M` subsymbols is modulated one subsymbol at
//! a time: K-point IFFT of the column, periodic tiling to `N = K·M` samples,
//! and multiplication by the prototype pulse circularly shifted by `m·K`.
//! Summing over subsymbols gives the transmit frame. The dense modulation
//! matrix has one column per symbol, at index `m·K + k`:
//!
//! ```text
//! a_{k,m}[n] = g[(n - mK) mod N] · exp(2πi·kn/K) / √K
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{dim_err, param_err, Result};
use crate::fft::UnitaryFft;
use crate::linalg::{self, reshape_cols, ComplexMatrix, ComplexVector, LuDecomposition};

/// Prototype pulse family.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// Raised-cosine impulse response with symbol spacing `K` samples,
    /// circularly wrapped onto the block and centered at sample 0.
    RaisedCosine { rolloff: f64 },
    /// Constant over the first `K` samples, zero elsewhere.
    Rect,
    /// Raised cosine with zero roll-off; the wrapped sinc is a Dirichlet kernel.
    Dirichlet,
    /// User-supplied samples of length `N`; rescaled like the built-in shapes.
    Custom(ComplexVector),
}

impl PulseShape {
    pub fn name(&self) -> &'static str {
        match self {
            PulseShape::RaisedCosine { .. } => "rc",
            PulseShape::Rect => "rect",
            PulseShape::Dirichlet => "dirichlet",
            PulseShape::Custom(_) => "custom",
        }
    }
}

/// Block geometry and prototype pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct GfdmConfig {
    subcarriers: usize,
    subsymbols: usize,
    pulse: PulseShape,
}

impl GfdmConfig {
    pub fn new(subcarriers: usize, subsymbols: usize, pulse: PulseShape) -> Result<Self> {
        if subcarriers == 0 || subsymbols == 0 {
            return param_err(format!(
                "GFDM needs K >= 1 and M >= 1, got K={subcarriers}, M={subsymbols}"
            ));
        }
        let n = subcarriers * subsymbols;
        match &pulse {
            PulseShape::RaisedCosine { rolloff } if !(0.0..=1.0).contains(rolloff) => {
                return param_err(format!("roll-off must lie in [0, 1], got {rolloff}"));
            }
            PulseShape::Custom(samples) if samples.len() != n => {
                return dim_err(format!(
                    "custom pulse needs {n} samples, got {}",
                    samples.len()
                ));
            }
            PulseShape::Custom(samples) if samples.energy() == 0.0 => {
                return param_err("custom pulse is identically zero");
            }
            _ => {}
        }
        Ok(Self {
            subcarriers,
            subsymbols,
            pulse,
        })
    }

    /// K.
    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// M.
    pub fn subsymbols(&self) -> usize {
        self.subsymbols
    }

    /// N = K·M.
    pub fn block_len(&self) -> usize {
        self.subcarriers * self.subsymbols
    }

    pub fn pulse(&self) -> &PulseShape {
        &self.pulse
    }
}

/// `K×M` data matrix; column `m` holds the symbols of subsymbol `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GfdmBlock {
    config: GfdmConfig,
    data: ComplexMatrix,
}

impl GfdmBlock {
    pub fn new(config: GfdmConfig, data: ComplexMatrix) -> Result<Self> {
        if data.rows() != config.subcarriers || data.cols() != config.subsymbols {
            return dim_err(format!(
                "GFDM block must be {}x{}, got {}x{}",
                config.subcarriers,
                config.subsymbols,
                data.rows(),
                data.cols()
            ));
        }
        Ok(Self { config, data })
    }

    /// Builds the block from `vec(D)` (subcarrier index fastest).
    pub fn from_vec(config: GfdmConfig, d: &[Complex64]) -> Result<Self> {
        let data = reshape_cols(d, config.subcarriers, config.subsymbols)?;
        Ok(Self { config, data })
    }

    pub fn config(&self) -> &GfdmConfig {
        &self.config
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn to_vec(&self) -> ComplexVector {
        linalg::vectorize(&self.data)
    }
}

// Raised-cosine spectrum at `bin` on a grid where one subcarrier spans
// `subsymbols` bins.
fn raised_cosine_spectrum(bin: i64, subsymbols: usize, rolloff: f64) -> f64 {
    let twice = 2 * bin.unsigned_abs() as usize;
    if rolloff == 0.0 {
        // brick wall, half weight exactly on the edge
        return match twice.cmp(&subsymbols) {
            std::cmp::Ordering::Less => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Greater => 0.0,
        };
    }
    let x = bin.unsigned_abs() as f64 / subsymbols as f64;
    let lo = (1.0 - rolloff) / 2.0;
    let hi = (1.0 + rolloff) / 2.0;
    if x <= lo {
        1.0
    } else if x >= hi {
        0.0
    } else {
        0.5 * (1.0 + (PI / rolloff * (x - lo)).cos())
    }
}

/// Generates the prototype pulse `g` of length `N`.
///
/// All shapes are scaled to `‖g‖² = K`, which gives every column of the
/// modulation matrix unit norm and makes `M = 1` with a rect pulse exactly
/// the OFDM modulator `F_K^H`. Built-in shapes are real and even about
/// sample 0.
///
/// The raised cosine is built from its band-limited spectrum: sampling the
/// spectrum on the `N`-bin grid, folding aliases, and taking the IDFT is the
/// same as sampling the impulse response and wrapping it circularly.
pub fn make_pulse(cfg: &GfdmConfig) -> ComplexVector {
    let k = cfg.subcarriers;
    let n = cfg.block_len();
    let raw: Vec<Complex64> = match &cfg.pulse {
        PulseShape::Rect => (0..n)
            .map(|i| Complex64::new(if i < k { 1.0 } else { 0.0 }, 0.0))
            .collect(),
        PulseShape::RaisedCosine { rolloff } => raised_cosine_pulse(k, cfg.subsymbols, *rolloff),
        PulseShape::Dirichlet => raised_cosine_pulse(k, cfg.subsymbols, 0.0),
        PulseShape::Custom(samples) => samples.to_vec(),
    };
    let energy: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
    let scale = (k as f64 / energy).sqrt();
    ComplexVector::from_vec(raw.into_iter().map(|z| z * scale).collect())
}

fn raised_cosine_pulse(subcarriers: usize, subsymbols: usize, rolloff: f64) -> Vec<Complex64> {
    let n = subcarriers * subsymbols;
    let ni = n as i64;
    // support is at most M bins either side, so two aliases each way suffice
    let spectrum: Vec<Complex64> = (0..ni)
        .map(|b| {
            let total: f64 = (-2..=2)
                .map(|q| raised_cosine_spectrum(b + q * ni, subsymbols, rolloff))
                .sum();
            Complex64::new(total, 0.0)
        })
        .collect();
    let time = crate::fft::ifft(&spectrum);
    time.iter().map(|z| Complex64::new(z.re, 0.0)).collect()
}

/// Dense `N×N` modulation matrix built from the per-column closed form.
pub fn modulation_matrix(cfg: &GfdmConfig) -> ComplexMatrix {
    let g = make_pulse(cfg);
    let k_len = cfg.subcarriers;
    let n_len = cfg.block_len();
    let scale = 1.0 / (k_len as f64).sqrt();
    ComplexMatrix::from_fn(n_len, n_len, |n, col| {
        let (m, k) = (col / k_len, col % k_len);
        let tap = g[(n + n_len - m * k_len) % n_len];
        let phase = 2.0 * PI * ((k * n) % k_len) as f64 / k_len as f64;
        tap * Complex64::from_polar(scale, phase)
    })
}

/// Receiver used by [`demodulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    /// `A^H·x`.
    MatchedFilter,
    /// `A^{-1}·x`.
    ZeroForcing,
}

/// Precomputed pulse and FFT plan for one configuration. Immutable and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct GfdmModulator {
    config: GfdmConfig,
    pulse: ComplexVector,
    fft: UnitaryFft,
}

impl GfdmModulator {
    pub fn new(config: GfdmConfig) -> Self {
        let pulse = make_pulse(&config);
        let fft = UnitaryFft::new(config.subcarriers);
        Self { config, pulse, fft }
    }

    pub fn config(&self) -> &GfdmConfig {
        &self.config
    }

    pub fn pulse(&self) -> &ComplexVector {
        &self.pulse
    }

    pub fn modulate(&self, block: &GfdmBlock) -> Result<ComplexVector> {
        if block.config.subcarriers != self.config.subcarriers
            || block.config.subsymbols != self.config.subsymbols
        {
            return dim_err("block geometry does not match the modulator");
        }
        self.modulate_vec(&block.to_vec())
    }

    /// Modulates `vec(D)` directly.
    pub fn modulate_vec(&self, d: &[Complex64]) -> Result<ComplexVector> {
        let (k_len, n_len) = (self.config.subcarriers, self.config.block_len());
        if d.len() != n_len {
            return dim_err(format!("expected {n_len} symbols, got {}", d.len()));
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n_len];
        let mut sub = vec![Complex64::new(0.0, 0.0); k_len];
        for m in 0..self.config.subsymbols {
            sub.copy_from_slice(&d[m * k_len..(m + 1) * k_len]);
            self.fft.inverse_in_place(&mut sub);
            let offset = m * k_len;
            for (n, out) in x.iter_mut().enumerate() {
                *out += self.pulse[(n + n_len - offset) % n_len] * sub[n % k_len];
            }
        }
        Ok(ComplexVector::from_vec(x))
    }

    /// `A^H·x` via the transposed fast structure: window, fold onto `K`
    /// samples, forward FFT.
    pub fn matched_filter(&self, x: &[Complex64]) -> Result<ComplexVector> {
        let (k_len, n_len) = (self.config.subcarriers, self.config.block_len());
        if x.len() != n_len {
            return dim_err(format!("expected {n_len} samples, got {}", x.len()));
        }
        let mut d = Vec::with_capacity(n_len);
        let mut folded = vec![Complex64::new(0.0, 0.0); k_len];
        for m in 0..self.config.subsymbols {
            folded.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let offset = m * k_len;
            for (n, sample) in x.iter().enumerate() {
                folded[n % k_len] += self.pulse[(n + n_len - offset) % n_len].conj() * sample;
            }
            self.fft.forward_in_place(&mut folded);
            d.extend_from_slice(&folded);
        }
        Ok(ComplexVector::from_vec(d))
    }

    /// Factorizes the dense modulation matrix for zero-forcing.
    pub fn zero_forcing(&self) -> Result<ZeroForcingReceiver> {
        let lu = LuDecomposition::new(&modulation_matrix(&self.config))?;
        Ok(ZeroForcingReceiver {
            config: self.config.clone(),
            lu,
        })
    }
}

/// LU-factorized modulation matrix.
#[derive(Debug, Clone)]
pub struct ZeroForcingReceiver {
    config: GfdmConfig,
    lu: LuDecomposition,
}

impl ZeroForcingReceiver {
    pub fn config(&self) -> &GfdmConfig {
        &self.config
    }

    /// `A^{-1}·x` as `vec(D̂)`.
    pub fn equalize(&self, x: &[Complex64]) -> Result<ComplexVector> {
        self.lu.solve(x)
    }
}

pub fn modulate(block: &GfdmBlock) -> ComplexVector {
    GfdmModulator::new(block.config.clone())
        .modulate(block)
        .expect("block geometry validated on construction")
}

pub fn demodulate(x: &[Complex64], cfg: &GfdmConfig, receiver: Receiver) -> Result<GfdmBlock> {
    let modulator = GfdmModulator::new(cfg.clone());
    let d = match receiver {
        Receiver::MatchedFilter => modulator.matched_filter(x)?,
        Receiver::ZeroForcing => {
            if x.len() != cfg.block_len() {
                return dim_err(format!(
                    "expected {} samples, got {}",
                    cfg.block_len(),
                    x.len()
                ));
            }
            modulator.zero_forcing()?.equalize(x)?
        }
    };
    GfdmBlock::from_vec(cfg.clone(), &d)
}

/// 2-norm condition number of the modulation matrix; `INFINITY` when it is
/// numerically singular.
pub fn condition_number(cfg: &GfdmConfig) -> f64 {
    linalg::condition_number(&modulation_matrix(cfg))
}
