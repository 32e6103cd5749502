//! Vector OFDM.
//!
//! A frame of `N = L·M` symbols is laid out column-major in an `M×L` matrix
//! whose columns are the vector blocks. Each row is taken to the time domain
//! with an `L`-point IFFT, and the result is read out column by column, so
//! row `r` lands on samples `r, r+M, r+2M, …`. The equivalent dense
//! modulation matrix is `F_L^H ⊗ I_M`.

use num_complex::Complex64;

use crate::error::{dim_err, param_err, Result};
use crate::fft::UnitaryFft;
use crate::linalg::{dft_matrix, kronecker, ComplexMatrix, ComplexVector};

/// Frame geometry: `block_len` (M) symbols per vector block, `num_blocks` (L)
/// vector blocks per frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VofdmConfig {
    block_len: usize,
    num_blocks: usize,
}

impl VofdmConfig {
    pub fn new(block_len: usize, num_blocks: usize) -> Result<Self> {
        if block_len == 0 || num_blocks == 0 {
            return param_err(format!(
                "VOFDM needs M >= 1 and L >= 1, got M={block_len}, L={num_blocks}"
            ));
        }
        Ok(Self { block_len, num_blocks })
    }

    /// M, the vector block length.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// L, the number of vector blocks.
    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    /// N = L·M.
    pub fn frame_len(&self) -> usize {
        self.block_len * self.num_blocks
    }
}

/// Symbol vector `d` paired with its geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct VofdmFrame {
    config: VofdmConfig,
    data: ComplexVector,
}

impl VofdmFrame {
    pub fn new(config: VofdmConfig, data: ComplexVector) -> Result<Self> {
        if data.len() != config.frame_len() {
            return dim_err(format!(
                "VOFDM frame needs {} symbols, got {}",
                config.frame_len(),
                data.len()
            ));
        }
        Ok(Self { config, data })
    }

    pub fn config(&self) -> VofdmConfig {
        self.config
    }

    pub fn data(&self) -> &ComplexVector {
        &self.data
    }
}

/// Dense `V = F_L^H ⊗ I_M`.
pub fn modulation_matrix(cfg: VofdmConfig) -> ComplexMatrix {
    let f_h = dft_matrix(cfg.num_blocks).expect("L >= 1").adjoint();
    kronecker(&f_h, &ComplexMatrix::identity(cfg.block_len))
}

/// Fast modulator/demodulator for one geometry; holds the `L`-point FFT plan.
#[derive(Debug, Clone)]
pub struct VofdmModulator {
    config: VofdmConfig,
    fft: UnitaryFft,
}

impl VofdmModulator {
    pub fn new(config: VofdmConfig) -> Self {
        Self {
            config,
            fft: UnitaryFft::new(config.num_blocks),
        }
    }

    pub fn config(&self) -> VofdmConfig {
        self.config
    }

    /// `x = vec(D·F_L^H)`.
    pub fn modulate(&self, d: &[Complex64]) -> Result<ComplexVector> {
        self.check_len(d.len())?;
        Ok(self.rowwise(d, |fft, row| fft.inverse_in_place(row)))
    }

    /// `V^H·x`, the exact inverse of [`modulate`](Self::modulate).
    pub fn demodulate(&self, x: &[Complex64]) -> Result<ComplexVector> {
        self.check_len(x.len())?;
        Ok(self.rowwise(x, |fft, row| fft.forward_in_place(row)))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.config.frame_len() {
            return dim_err(format!(
                "expected {} samples for M={}, L={}, got {len}",
                self.config.frame_len(),
                self.config.block_len,
                self.config.num_blocks
            ));
        }
        Ok(())
    }

    // Row r of the column-major M×L matrix sits at stride M from offset r,
    // which is also where it goes after the transform.
    fn rowwise(
        &self,
        input: &[Complex64],
        transform: impl Fn(&UnitaryFft, &mut [Complex64]),
    ) -> ComplexVector {
        let m = self.config.block_len;
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        let mut row = vec![Complex64::new(0.0, 0.0); self.config.num_blocks];
        for r in 0..m {
            for (c, z) in row.iter_mut().enumerate() {
                *z = input[c * m + r];
            }
            transform(&self.fft, &mut row);
            for (c, z) in row.iter().enumerate() {
                out[c * m + r] = *z;
            }
        }
        ComplexVector::from_vec(out)
    }
}

pub fn modulate(frame: &VofdmFrame) -> ComplexVector {
    VofdmModulator::new(frame.config)
        .modulate(&frame.data)
        .expect("frame length validated on construction")
}

pub fn demodulate(x: &[Complex64], cfg: VofdmConfig) -> Result<ComplexVector> {
    VofdmModulator::new(cfg).demodulate(x)
}
