//! `mcwave` command-line front end.
//!
//! Subcommands `modulate`, `matrix`, `verify` and `ber` each write one CSV
//! file (see [`csvio`]). Exit codes: 0 success, 1 a verification check
//! failed, 2 invalid arguments or configuration, 3 I/O failure.

pub mod config;
pub mod csvio;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mcwave_core::linksim::{self, run_ber, LinkSystem};
use mcwave_core::spectral::{verification_suite, Limit};
use mcwave_core::{gfdm, vofdm, ComplexVector, GfdmModulator, VofdmModulator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{required, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<mcwave_core::Error> for CliError {
    fn from(e: mcwave_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "mcwave", version, about = "GFDM and vector-OFDM modulation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modulate one frame and write its samples (`index,re,im`).
    Modulate(ModulateArgs),
    /// Export the dense modulation matrix (`row,col,re,im`).
    Matrix(MatrixArgs),
    /// Run the spectral verification suite (`check_name,value,tolerance,pass`).
    Verify(VerifyArgs),
    /// Bit-error-rate sweep over a cyclic channel (`system,snr_db,bits,errors,ber,seed`).
    Ber(BerArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// `vofdm` or `gfdm`.
    #[arg(long)]
    pub system: Option<String>,
    /// VOFDM vector block length, or GFDM subsymbol count.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// VOFDM number of vector blocks.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// GFDM subcarrier count.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// GFDM pulse: rc, rect or dirichlet.
    #[arg(long)]
    pub pulse: Option<String>,
    /// Raised-cosine roll-off in [0, 1].
    #[arg(long)]
    pub rolloff: Option<f64>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Transmit the unit impulse at this symbol index.
    #[arg(long, conflicts_with = "input")]
    pub impulse: Option<usize>,
    /// Read symbols from a CSV file (`index,re,im`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed for random QPSK symbols when neither --impulse nor --input is given.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Largest frame length N that may be exported.
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// VOFDM vector block length.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// VOFDM number of vector blocks.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// GFDM subcarrier count.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// GFDM subsymbol count.
    #[arg(long = "gfdm-M")]
    pub gfdm_m: Option<usize>,
    #[arg(long)]
    pub pulse: Option<String>,
    #[arg(long)]
    pub rolloff: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace the tolerance of every error-type check.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BerArgs {
    /// Comma-separated subset of ofdm, vofdm, gfdm.
    #[arg(long, value_delimiter = ',')]
    pub systems: Option<Vec<String>>,
    /// Frame length in samples, shared by all systems.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// VOFDM vector block length.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// GFDM subcarrier count; the subsymbol count is N/K.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub pulse: Option<String>,
    #[arg(long)]
    pub rolloff: Option<f64>,
    /// `identity` or `null` (two taps [1,1]/√2).
    #[arg(long)]
    pub channel: Option<String>,
    /// Custom taps `re[:im],...`; overrides --channel.
    #[arg(long)]
    pub taps: Option<String>,
    /// Comma-separated SNR values in dB.
    #[arg(long = "snr", value_delimiter = ',', allow_negative_numbers = true)]
    pub snr_db: Option<Vec<f64>>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_MAX_N: usize = 1024;

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    path.map_or_else(|| Ok(ExperimentConfig::default()), ExperimentConfig::load)
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn format_err(e: csvio::FormatError) -> CliError {
    CliError::Io(e.to_string())
}

/// Resolved modulator choice for `modulate` and `matrix`.
enum Modulator {
    Vofdm(VofdmModulator),
    Gfdm(GfdmModulator),
}

impl Modulator {
    fn resolve(args: &SystemArgs, file: &ExperimentConfig) -> Result<Self, CliError> {
        let system = required(args.system.clone().or(file.system.clone()), "system")?;
        let m = args.m.or(file.m);
        match system.as_str() {
            "vofdm" => {
                let cfg = config::vofdm_config(required(m, "M")?, required(args.l.or(file.l), "L")?)?;
                Ok(Modulator::Vofdm(VofdmModulator::new(cfg)))
            }
            "gfdm" => {
                let pulse = args.pulse.clone().or(file.pulse.clone()).unwrap_or_else(|| "rc".into());
                let cfg = config::gfdm_config(
                    required(args.k.or(file.k), "K")?,
                    required(m, "M")?,
                    &pulse,
                    args.rolloff.or(file.rolloff),
                )?;
                Ok(Modulator::Gfdm(GfdmModulator::new(cfg)))
            }
            other => Err(CliError::Usage(format!(
                "unknown system `{other}` (expected vofdm or gfdm)"
            ))),
        }
    }

    fn frame_len(&self) -> usize {
        match self {
            Modulator::Vofdm(v) => v.config().frame_len(),
            Modulator::Gfdm(g) => g.config().block_len(),
        }
    }
}

pub fn cmd_modulate(args: &ModulateArgs) -> Result<(), CliError> {
    let file = load_config(args.system.config.as_deref())?;
    let modulator = Modulator::resolve(&args.system, &file)?;
    let n = modulator.frame_len();

    let input = args.input.clone().or(file.input.clone());
    let impulse = args.impulse.or(file.impulse);
    let symbols = if let Some(index) = impulse {
        ComplexVector::unit(n, index)?
    } else if let Some(path) = input {
        let f = fs::File::open(&path)
            .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
        let samples = csvio::read_samples(f)
            .map_err(|e| CliError::Usage(format!("bad symbol file {}: {e}", path.display())))?;
        ComplexVector::new(samples)?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.or(file.seed).unwrap_or(0));
        let bits: Vec<bool> = (0..2 * n).map(|_| rng.random()).collect();
        linksim::qpsk_map(&bits)?
    };

    let x = match &modulator {
        Modulator::Vofdm(v) => v.modulate(&symbols)?,
        Modulator::Gfdm(g) => g.modulate_vec(&symbols)?,
    };
    let mut buf = Vec::new();
    csvio::write_samples(&mut buf, &x).map_err(format_err)?;
    emit(args.system.output.as_deref().or(file.output.as_deref()), &buf)
}

pub fn cmd_matrix(args: &MatrixArgs) -> Result<(), CliError> {
    let file = load_config(args.system.config.as_deref())?;
    let modulator = Modulator::resolve(&args.system, &file)?;
    let cap = args.max_n.or(file.max_n).unwrap_or(DEFAULT_MAX_N);
    if modulator.frame_len() > cap {
        return Err(CliError::Usage(format!(
            "N = {} exceeds the export cap of {cap} (raise it with --max-n)",
            modulator.frame_len()
        )));
    }
    let matrix = match &modulator {
        Modulator::Vofdm(v) => vofdm::modulation_matrix(v.config()),
        Modulator::Gfdm(g) => gfdm::modulation_matrix(g.config()),
    };
    let mut buf = Vec::new();
    csvio::write_matrix(&mut buf, &matrix).map_err(format_err)?;
    emit(args.system.output.as_deref().or(file.output.as_deref()), &buf)
}

/// Returns whether every check passed. The report is written either way.
pub fn cmd_verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let file = load_config(args.config.as_deref())?;
    let vcfg = config::vofdm_config(args.m.or(file.m).unwrap_or(3), args.l.or(file.l).unwrap_or(4))?;
    let pulse = args.pulse.clone().or(file.pulse.clone()).unwrap_or_else(|| "rc".into());
    let gcfg = config::gfdm_config(
        args.k.or(file.k).unwrap_or(3),
        args.gfdm_m.or(file.gfdm_m).unwrap_or(4),
        &pulse,
        Some(args.rolloff.or(file.rolloff).unwrap_or(0.5)),
    )?;
    let mut checks = verification_suite(vcfg, &gcfg, args.seed.or(file.seed).unwrap_or(0))?;
    if let Some(tol) = args.tolerance.or(file.tolerance) {
        for check in checks.iter_mut().filter(|c| c.kind == Limit::AtMost) {
            check.limit = tol;
        }
    }
    let mut buf = Vec::new();
    csvio::write_report(&mut buf, &checks).map_err(format_err)?;
    emit(args.output.as_deref().or(file.output.as_deref()), &buf)?;

    let failed: Vec<&str> = checks.iter().filter(|c| !c.passes()).map(|c| c.name).collect();
    if !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}

pub fn cmd_ber(args: &BerArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let names = args
        .systems
        .clone()
        .or(file.systems.clone())
        .unwrap_or_else(|| vec!["ofdm".into(), "vofdm".into()]);
    let n = args.n.or(file.n).unwrap_or(16);
    let pulse = args.pulse.clone().or(file.pulse.clone()).unwrap_or_else(|| "rc".into());
    let rolloff = args.rolloff.or(file.rolloff).or(Some(0.5));
    let systems: Vec<LinkSystem> = names
        .iter()
        .map(|name| {
            config::link_system(
                name,
                n,
                args.m.or(file.m).unwrap_or(2),
                args.k.or(file.k).unwrap_or(4),
                &pulse,
                rolloff,
            )
        })
        .collect::<Result<_, _>>()?;

    let taps = match (&args.taps, &file.taps) {
        (Some(text), _) => Some(config::parse_taps(text)?),
        (None, Some(pairs)) => Some(pairs.iter().map(|[re, im]| mcwave_core::Complex64::new(*re, *im)).collect()),
        (None, None) => None,
    };
    let channel = config::channel(args.channel.as_deref().or(file.channel.as_deref()), taps)?;
    let snrs = args
        .snr_db
        .clone()
        .or(file.snr_db.clone())
        .unwrap_or_else(|| vec![0.0, 5.0, 10.0, 15.0, 20.0]);
    let frames = args.frames.or(file.frames).unwrap_or(10_000);
    let seed = args.seed.or(file.seed).unwrap_or(0);

    eprintln!("channel: {channel}");
    for system in &systems {
        eprintln!("{}: N = {}, receiver: {}", system.kind(), system.frame_len(), system.receiver_description());
    }

    let mut results = Vec::with_capacity(systems.len() * snrs.len());
    for system in &systems {
        for &snr in &snrs {
            results.push(run_ber(system, &channel, snr, frames, seed)?);
        }
    }
    let mut buf = Vec::new();
    csvio::write_ber(&mut buf, &results).map_err(format_err)?;
    emit(args.output.as_deref().or(file.output.as_deref()), &buf)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Modulate(a) => cmd_modulate(a).map(|_| true),
        Command::Matrix(a) => cmd_matrix(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Ber(a) => cmd_ber(a).map(|_| true),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
