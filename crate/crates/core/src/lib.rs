//! GFDM and vector-OFDM modulators.
//!
//! Each modulator comes as a fast structured implementation and a dense
//! modulation matrix, so the two can be checked against each other. On top
//! of that sit frequency-domain structure checks ([`spectral`]) and a small
//! uncoded link simulator ([`linksim`]).

pub mod error;
pub mod fft;
pub mod gfdm;
pub mod linalg;
pub mod linksim;
pub mod spectral;
pub mod vofdm;

pub use error::{Error, Result};
pub use gfdm::{GfdmBlock, GfdmConfig, GfdmModulator, PulseShape, Receiver};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use num_complex::Complex64;
pub use vofdm::{VofdmConfig, VofdmFrame, VofdmModulator};
