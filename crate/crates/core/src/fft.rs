//! Unitary FFT of arbitrary length.
//!
//! Both directions scale by `1/√N`, so `fft(v)` equals `dft_matrix(N)·v` and
//! `ifft` is its adjoint. Any length is accepted; the planner picks mixed-radix,
//! Rader or Bluestein algorithms as needed.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::linalg::ComplexVector;

/// Planned forward/inverse transform pair for one length. Cheap to clone and
/// safe to share between threads.
#[derive(Clone)]
pub struct UnitaryFft {
    len: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for UnitaryFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryFft").field("len", &self.len).finish()
    }
}

impl UnitaryFft {
    /// Panics if `len` is zero.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            len,
            scale: 1.0 / (len as f64).sqrt(),
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        self.forward.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        self.inverse.process(buf);
        buf.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn forward(&self, v: &[Complex64]) -> ComplexVector {
        let mut buf = v.to_vec();
        self.forward_in_place(&mut buf);
        ComplexVector::from_vec(buf)
    }

    pub fn inverse(&self, v: &[Complex64]) -> ComplexVector {
        let mut buf = v.to_vec();
        self.inverse_in_place(&mut buf);
        ComplexVector::from_vec(buf)
    }
}

/// One-shot unitary forward transform.
pub fn fft(v: &[Complex64]) -> ComplexVector {
    UnitaryFft::new(v.len()).forward(v)
}

/// One-shot unitary inverse transform.
pub fn ifft(v: &[Complex64]) -> ComplexVector {
    UnitaryFft::new(v.len()).inverse(v)
}
