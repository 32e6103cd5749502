use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mcwave_cli::csvio::{read_ber, read_matrix, read_report, read_samples};
use mcwave_core::linalg::dft_matrix;

fn mcwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcwave"))
        .args(args)
        .output()
        .expect("run mcwave")
}

fn run_to(args: &[&str], out: &Path) -> i32 {
    let mut all: Vec<&str> = args.to_vec();
    let out = out.to_str().unwrap();
    all.extend(["--output", out]);
    mcwave(&all).status.code().unwrap()
}

#[test]
fn vofdm_impulse_with_single_row_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(run_to(&["modulate", "--system", "vofdm", "--M", "1", "--L", "4", "--impulse", "0"], &out), 0);
    let x = read_samples(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(x.len(), 4);
    for z in x {
        assert!((z.re - 0.5).abs() < 1e-15 && z.im.abs() < 1e-15);
    }
}

#[test]
fn ofdm_degenerate_cases_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("v.csv"), dir.path().join("g.csv"));
    assert_eq!(run_to(&["modulate", "--system", "vofdm", "--M", "1", "--L", "4", "--impulse", "1"], &a), 0);
    assert_eq!(
        run_to(&["modulate", "--system", "gfdm", "--K", "4", "--M", "1", "--pulse", "rect", "--impulse", "1"], &b),
        0
    );
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn modulate_reads_symbol_file() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (dir.path().join("d.csv"), dir.path().join("x.csv"));
    fs::write(&input, "index,re,im\n0,0,0\n1,1,0\n0,0,0\n").unwrap();
    // rows out of order are rejected as bad input
    assert_eq!(run_to(&["modulate", "--system", "vofdm", "--M", "1", "--L", "3", "--input", input.to_str().unwrap()], &out), 2);
    fs::write(&input, "index,re,im\n0,0,0\n1,1,0\n2,0,0\n").unwrap();
    assert_eq!(run_to(&["modulate", "--system", "vofdm", "--M", "3", "--L", "1", "--input", input.to_str().unwrap()], &out), 0);
    let x = read_samples(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(x[1].re, 1.0);
    let missing = dir.path().join("nope.csv");
    assert_eq!(run_to(&["modulate", "--system", "vofdm", "--M", "3", "--L", "1", "--input", missing.to_str().unwrap()], &out), 3);
}

#[test]
fn invalid_parameters_exit_with_usage_code() {
    let bad: [&[&str]; 5] = [
        &["modulate", "--system", "gfdm", "--K", "4", "--M", "2", "--pulse", "rc", "--rolloff", "1.5"],
        &["modulate", "--system", "vofdm", "--M", "0", "--L", "4"],
        &["modulate", "--system", "ofdm", "--M", "1", "--L", "4"],
        &["modulate", "--system", "vofdm", "--M", "2"],
        &["frobnicate"],
    ];
    for args in bad {
        let out = mcwave(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn matrix_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    assert_eq!(run_to(&["matrix", "--system", "vofdm", "--M", "2", "--L", "1"], &out), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    let v = read_matrix(text.as_bytes()).unwrap();
    assert_eq!(v.max_abs_diff(&mcwave_core::ComplexMatrix::identity(2)), 0.0);

    let out = dir.path().join("a.csv");
    assert_eq!(run_to(&["matrix", "--system", "gfdm", "--K", "4", "--M", "1", "--pulse", "rect"], &out), 0);
    let a = read_matrix(fs::File::open(&out).unwrap()).unwrap();
    assert!(a.max_abs_diff(&dft_matrix(4).unwrap().adjoint()) < 1e-15);

    assert_eq!(run_to(&["matrix", "--system", "vofdm", "--M", "8", "--L", "8", "--max-n", "32"], &out), 2);
}

#[test]
fn verify_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    assert_eq!(run_to(&["verify"], &out), 0);
    let rows = read_report(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.pass));

    assert_eq!(run_to(&["verify", "--tolerance", "1e-30"], &out), 1);
    let rows = read_report(fs::File::open(&out).unwrap()).unwrap();
    assert!(rows.iter().any(|r| !r.pass));

    let shape = ["verify", "--M", "2", "--L", "8", "--K", "4", "--gfdm-M", "4", "--pulse"];
    assert_eq!(run_to(&[&shape[..], &["dirichlet"]].concat(), &out), 0);
    // a rect pulse is not band-limited, so its in-band check fails
    assert_eq!(run_to(&[&shape[..], &["rect"]].concat(), &out), 1);
    let rows = read_report(fs::File::open(&out).unwrap()).unwrap();
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.check_name.as_str()).collect();
    assert_eq!(failed, ["gfdm_inband_energy_fraction"]);
    // the two systems must share N
    assert_eq!(run_to(&["verify", "--M", "2", "--L", "2"], &out), 2);
}

#[test]
fn ber_identity_channel_is_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let args = ["ber", "--systems", "ofdm,vofdm", "--channel", "identity", "--snr", "100", "--frames", "50"];
    assert_eq!(run_to(&args, &out), 0);
    let rows = read_ber(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.errors == 0 && r.bits == 50 * 32));
}

#[test]
fn ber_sweep_is_reproducible_and_shows_diversity() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["ber", "--snr", "15", "--frames", "4000", "--seed", "3"];
    assert_eq!(run_to(&args, &a), 0);
    assert_eq!(run_to(&args, &b), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let rows = read_ber(fs::File::open(&a).unwrap()).unwrap();
    let ber = |name: &str| rows.iter().find(|r| r.system == name).unwrap().ber;
    assert!(ber("vofdm") < ber("ofdm"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let out = dir.path().join("x.csv");
    fs::write(&cfg, "system = \"vofdm\"\nM = 2\nL = 3\nimpulse = 0\n").unwrap();
    assert_eq!(run_to(&["modulate", "--config", cfg.to_str().unwrap()], &out), 0);
    assert_eq!(read_samples(fs::File::open(&out).unwrap()).unwrap().len(), 6);
    assert_eq!(run_to(&["modulate", "--config", cfg.to_str().unwrap(), "--L", "5"], &out), 0);
    assert_eq!(read_samples(fs::File::open(&out).unwrap()).unwrap().len(), 10);

    fs::write(&cfg, "system = \"vofdm\"\nM = 2\nL = 3\ncolour = 1\n").unwrap();
    assert_eq!(run_to(&["modulate", "--config", cfg.to_str().unwrap()], &out), 2);
    let missing = dir.path().join("missing.toml");
    assert_eq!(run_to(&["modulate", "--config", missing.to_str().unwrap()], &out), 3);
}

#[test]
fn ber_custom_taps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let args = ["ber", "--systems", "gfdm", "--N", "15", "--K", "5", "--taps", "0.8,0.6:0", "--snr", "30", "--frames", "20"];
    assert_eq!(run_to(&args, &out), 0);
    let rows = read_ber(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows[0].system, "gfdm");
    assert_eq!(run_to(&["ber", "--taps", "x"], &out), 2);
}

#[test]
fn modulate_writes_to_stdout_by_default() {
    let out = mcwave(&["modulate", "--system", "vofdm", "--M", "2", "--L", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let x = read_samples(out.stdout.as_slice()).unwrap();
    assert_eq!(x.len(), 4);
}
