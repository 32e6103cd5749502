//! Statistical checks of the link simulator against closed-form expectations.

use mcwave_core::linksim::{run_ber, ChannelSpec, LinkSystem};
use mcwave_core::{GfdmConfig, PulseShape, VofdmConfig};

const N: usize = 16;

// Gaussian tail probability by Simpson integration of the density.
fn q_function(x: f64) -> f64 {
    let (a, b, steps) = (x, x + 40.0, 20_000);
    let h = (b - a) / steps as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut sum = pdf(a) + pdf(b);
    for i in 1..steps {
        sum += pdf(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

// Per-bin ZF over the two-tap channel: the nulled bin guesses, the others
// see Q(|H_f|/σ) per bit.
fn ofdm_null_channel_ber(snr_db: f64) -> f64 {
    let sigma = 10f64.powf(-snr_db / 20.0);
    let h = ChannelSpec::two_tap_null().frequency_response(N).unwrap();
    let per_bin: f64 = (0..N)
        .map(|f| if f == N / 2 { 0.5 } else { q_function(h[f].norm() / sigma) })
        .sum();
    per_bin / N as f64
}

#[test]
fn q_function_reference_points() {
    assert!((q_function(0.0) - 0.5).abs() < 1e-10);
    assert!((q_function(1.0) - 0.158_655_253_931_457).abs() < 1e-10);
    assert!((q_function(3.0) - 0.001_349_898_031_630_1).abs() < 1e-12);
}

#[test]
fn ofdm_plateau_at_spectral_null() {
    // at 100 dB only the nulled bin errs: one expected error per 2N bits
    let frames = 4000;
    let r = run_ber(&LinkSystem::Ofdm { subcarriers: N }, &ChannelSpec::two_tap_null(), 100.0, frames, 5).unwrap();
    let expected = 1.0 / (2 * N) as f64;
    // errors ~ Binomial(2·frames, 1/2) on the nulled bin's bits
    let sigma = (2.0 * frames as f64 * 0.25).sqrt() / r.bits_sent as f64;
    assert!((r.ber - expected).abs() < 5.0 * sigma, "ber {} vs {}", r.ber, expected);
}

#[test]
fn ofdm_null_channel_matches_closed_form_at_15_db() {
    let r = run_ber(&LinkSystem::Ofdm { subcarriers: N }, &ChannelSpec::two_tap_null(), 15.0, 10_000, 9).unwrap();
    let expected = ofdm_null_channel_ber(15.0);
    assert!((r.ber - expected).abs() < 0.03 * expected, "ber {} vs {}", r.ber, expected);
}

#[test]
fn vofdm_beats_ofdm_on_null_channel() {
    let ch = ChannelSpec::two_tap_null();
    let ofdm = run_ber(&LinkSystem::Ofdm { subcarriers: N }, &ch, 15.0, 10_000, 21).unwrap();
    let vofdm = run_ber(&LinkSystem::Vofdm(VofdmConfig::new(2, N / 2).unwrap()), &ch, 15.0, 10_000, 21).unwrap();
    assert!(vofdm.ber < ofdm.ber, "vofdm {} ofdm {}", vofdm.ber, ofdm.ber);
}

#[test]
fn ber_falls_with_snr_on_identity_channel() {
    let ch = ChannelSpec::identity();
    let systems = [
        LinkSystem::Ofdm { subcarriers: N },
        LinkSystem::Vofdm(VofdmConfig::new(4, 4).unwrap()),
        LinkSystem::Gfdm(GfdmConfig::new(4, 5, PulseShape::RaisedCosine { rolloff: 0.3 }).unwrap()),
    ];
    for system in &systems {
        let low = run_ber(system, &ch, 0.0, 10_000, 2).unwrap();
        let high = run_ber(system, &ch, 10.0, 10_000, 2).unwrap();
        assert!(high.ber <= low.ber, "{:?}: {} > {}", system.kind(), high.ber, low.ber);
    }
}

#[test]
fn unitary_systems_match_awgn_theory() {
    // identity channel: OFDM and VOFDM are unitary, so BER = Q(√(Es/N0))
    let snr_db = 6.0;
    let expected = q_function(10f64.powf(snr_db / 20.0));
    for system in [LinkSystem::Ofdm { subcarriers: N }, LinkSystem::Vofdm(VofdmConfig::new(2, 8).unwrap())] {
        let r = run_ber(&system, &ChannelSpec::identity(), snr_db, 5000, 4).unwrap();
        assert!((r.ber - expected).abs() < 0.05 * expected, "{:?}: {} vs {}", system.kind(), r.ber, expected);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let system = LinkSystem::Vofdm(VofdmConfig::new(2, 8).unwrap());
    let ch = ChannelSpec::two_tap_null();
    let parallel = run_ber(&system, &ch, 12.0, 500, 77).unwrap();
    let sequential = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_ber(&system, &ch, 12.0, 500, 77).unwrap());
    assert_eq!(parallel, sequential);
}
