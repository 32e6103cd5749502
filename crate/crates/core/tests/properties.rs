use std::f64::consts::PI;

use mcwave_core::fft::fft;
use mcwave_core::gfdm::{self, GfdmModulator};
use mcwave_core::linalg::{circular_shift, reshape_cols, vectorize, ComplexVector};
use mcwave_core::vofdm::{self, VofdmModulator};
use mcwave_core::{Complex64, GfdmConfig, PulseShape, VofdmConfig};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn vector(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(), len)
}

fn vofdm_case() -> impl Strategy<Value = (VofdmConfig, Vec<Complex64>)> {
    (1usize..=8, 1usize..=8)
        .prop_flat_map(|(m, l)| (Just(VofdmConfig::new(m, l).unwrap()), vector(m * l)))
}

fn pulse() -> impl Strategy<Value = PulseShape> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|rolloff| PulseShape::RaisedCosine { rolloff }),
        Just(PulseShape::Rect),
        Just(PulseShape::Dirichlet),
    ]
}

fn gfdm_case() -> impl Strategy<Value = (GfdmConfig, Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=12, 1usize..=6, pulse()).prop_flat_map(|(k, m, p)| {
        (
            Just(GfdmConfig::new(k, m, p).unwrap()),
            vector(k * m),
            vector(k * m),
        )
    })
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reshape_then_vectorize_is_identity(rows in 1usize..6, cols in 1usize..6, seed in vector(36)) {
        let v = &seed[..rows * cols];
        let m = reshape_cols(v, rows, cols).unwrap();
        let back = vectorize(&m);
        prop_assert_eq!(back.as_slice(), v);
    }

    #[test]
    fn circular_shifts_compose(v in vector(7), a in -20isize..20, b in -20isize..20) {
        let twice = circular_shift(&circular_shift(&v, a), b);
        prop_assert_eq!(twice, circular_shift(&v, a + b));
    }

    #[test]
    fn vofdm_fast_dense_energy_round_trip((cfg, d) in vofdm_case()) {
        let modulator = VofdmModulator::new(cfg);
        let x = modulator.modulate(&d).unwrap();
        let dense = vofdm::modulation_matrix(cfg).mul_vec(&d).unwrap();
        prop_assert!(x.max_abs_diff(&dense) < 1e-10);
        let d_norm = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((x.norm() - d_norm).abs() < 1e-10);
        prop_assert!(modulator.demodulate(&x).unwrap().max_abs_diff(&d) < 1e-10);
    }

    #[test]
    fn vofdm_rows_rotate_spectral_copies((cfg, d) in vofdm_case(), row_pick in 0usize..8) {
        let (m, l, n) = (cfg.block_len(), cfg.num_blocks(), cfg.frame_len());
        let row = row_pick % m;
        let mut masked = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..l {
            masked[c * m + row] = d[c * m + row];
        }
        let x = VofdmModulator::new(cfg).modulate(&masked).unwrap();
        for (i, z) in x.iter().enumerate() {
            if i % m != row {
                prop_assert_eq!(z.norm(), 0.0);
            }
        }
        let spectrum = fft(&x);
        let rot = Complex64::from_polar(1.0, -2.0 * PI * row as f64 / m as f64);
        for f in 0..n {
            prop_assert!((spectrum[(f + l) % n] - spectrum[f] * rot).norm() < 1e-9);
        }
    }

    #[test]
    fn gfdm_fast_matches_dense_and_is_linear((cfg, d1, d2) in gfdm_case(), alpha in complex(), beta in complex()) {
        let modulator = GfdmModulator::new(cfg.clone());
        let x1 = modulator.modulate_vec(&d1).unwrap();
        let dense = gfdm::modulation_matrix(&cfg).mul_vec(&d1).unwrap();
        prop_assert!(x1.max_abs_diff(&dense) < 1e-10);

        let x2 = modulator.modulate_vec(&d2).unwrap();
        let mix: Vec<Complex64> = d1.iter().zip(&d2).map(|(a, b)| alpha * a + beta * b).collect();
        let combined: Vec<Complex64> = x1.iter().zip(x2.iter()).map(|(a, b)| alpha * a + beta * b).collect();
        prop_assert!(max_diff(&modulator.modulate_vec(&mix).unwrap(), &combined) < 1e-10);
    }

    #[test]
    fn gfdm_subsymbol_position_only_changes_phase((cfg, d, _) in gfdm_case(), pick in 0usize..6) {
        let (k, m) = (cfg.subcarriers(), cfg.subsymbols());
        let target = pick % m;
        let modulator = GfdmModulator::new(cfg.clone());
        let spectrum_at = |slot: usize| {
            let mut only = vec![Complex64::new(0.0, 0.0); k * m];
            only[slot * k..(slot + 1) * k].copy_from_slice(&d[..k]);
            fft(&modulator.modulate_vec(&only).unwrap())
        };
        let (base, moved) = (spectrum_at(0), spectrum_at(target));
        for (a, b) in base.iter().zip(moved.iter()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn gfdm_single_symbol_column((cfg, _, _) in gfdm_case(), pick in 0usize..72) {
        let (k, n) = (cfg.subcarriers(), cfg.block_len());
        let idx = pick % n;
        let (m_idx, k_idx) = (idx / k, idx % k);
        let g = gfdm::make_pulse(&cfg);
        let x = GfdmModulator::new(cfg.clone())
            .modulate_vec(&ComplexVector::unit(n, idx).unwrap())
            .unwrap();
        for i in 0..n {
            let want = g[(i + n - m_idx * k) % n]
                * Complex64::from_polar(1.0 / (k as f64).sqrt(), 2.0 * PI * (k_idx * i) as f64 / k as f64);
            prop_assert!((x[i] - want).norm() < 1e-12);
        }
    }
}
