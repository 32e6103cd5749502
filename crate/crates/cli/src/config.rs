//! Structured experiment configuration (TOML) and its validation into
//! library configuration types. Command-line flags take precedence over
//! values from the file.

use std::path::{Path, PathBuf};

use mcwave_core::linksim::{ChannelSpec, LinkSystem};
use mcwave_core::{Complex64, ComplexVector, GfdmConfig, PulseShape, VofdmConfig};
use serde::Deserialize;

use crate::CliError;

/// Every key the config file may contain. Unknown keys are rejected.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: Option<String>,
    pub systems: Option<Vec<String>>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// GFDM subsymbol count where `M` already names the VOFDM block length.
    #[serde(rename = "gfdm_M")]
    pub gfdm_m: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub pulse: Option<String>,
    pub rolloff: Option<f64>,
    pub channel: Option<String>,
    /// `[re, im]` pairs.
    pub taps: Option<Vec<[f64; 2]>>,
    pub snr_db: Option<Vec<f64>>,
    pub frames: Option<usize>,
    pub seed: Option<u64>,
    pub impulse: Option<usize>,
    pub input: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub max_n: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config file: {e}")))
    }
}

pub fn required<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter `{name}`")))
}

pub fn pulse_shape(name: &str, rolloff: Option<f64>) -> Result<PulseShape, CliError> {
    match name {
        "rc" | "raised-cosine" => Ok(PulseShape::RaisedCosine {
            rolloff: required(rolloff, "rolloff")?,
        }),
        "rect" => Ok(PulseShape::Rect),
        "dirichlet" => Ok(PulseShape::Dirichlet),
        other => Err(CliError::Usage(format!(
            "unknown pulse `{other}` (expected rc, rect or dirichlet)"
        ))),
    }
}

pub fn vofdm_config(m: usize, l: usize) -> Result<VofdmConfig, CliError> {
    Ok(VofdmConfig::new(m, l)?)
}

pub fn gfdm_config(k: usize, m: usize, pulse: &str, rolloff: Option<f64>) -> Result<GfdmConfig, CliError> {
    Ok(GfdmConfig::new(k, m, pulse_shape(pulse, rolloff)?)?)
}

/// Parses `re[:im]` items separated by commas.
pub fn parse_taps(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (re, im) = match item.split_once(':') {
                Some((re, im)) => (re, im),
                None => (item, "0"),
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad channel tap `{item}`")))
            };
            Ok(Complex64::new(parse(re)?, parse(im)?))
        })
        .collect()
}

pub fn channel(name: Option<&str>, taps: Option<Vec<Complex64>>) -> Result<ChannelSpec, CliError> {
    if let Some(taps) = taps {
        let description = format!(
            "custom taps [{}]",
            taps.iter()
                .map(|z| format!("{}{:+}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(", ")
        );
        return Ok(ChannelSpec::new(ComplexVector::new(taps)?, description)?);
    }
    match name.unwrap_or("null") {
        "null" => Ok(ChannelSpec::two_tap_null()),
        "identity" => Ok(ChannelSpec::identity()),
        other => Err(CliError::Usage(format!(
            "unknown channel `{other}` (expected identity or null)"
        ))),
    }
}

/// Builds the link system for `name` at frame length `n`.
pub fn link_system(
    name: &str,
    n: usize,
    vofdm_m: usize,
    gfdm_k: usize,
    pulse: &str,
    rolloff: Option<f64>,
) -> Result<LinkSystem, CliError> {
    let divide = |by: usize, what: &str| {
        if by == 0 || !n.is_multiple_of(by) {
            Err(CliError::Usage(format!("frame length {n} is not a multiple of {what}={by}")))
        } else {
            Ok(n / by)
        }
    };
    match name {
        "ofdm" => Ok(LinkSystem::Ofdm { subcarriers: n }),
        "vofdm" => Ok(LinkSystem::Vofdm(vofdm_config(vofdm_m, divide(vofdm_m, "M")?)?)),
        "gfdm" => Ok(LinkSystem::Gfdm(gfdm_config(gfdm_k, divide(gfdm_k, "K")?, pulse, rolloff)?)),
        other => Err(CliError::Usage(format!(
            "unknown system `{other}` (expected ofdm, vofdm or gfdm)"
        ))),
    }
}
