//! Model parameters from CLI flags and/or a flat key=value config file,
//! flags taking precedence.

use clap::Args;
use lambda_dicke::model::ModelParams;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    /// Energy offset E1 (default 0).
    #[arg(long)]
    pub e1: Option<f64>,
    /// Ground-state gap delta = E2 - E1.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Excited-state gap Delta = E3 - E1.
    #[arg(long = "Delta")]
    pub cap_delta: Option<f64>,
    /// Frequency of the blue-branch mode.
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Frequency of the red-branch mode.
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Blue-branch coupling (default 0).
    #[arg(long)]
    pub g1: Option<f64>,
    /// Red-branch coupling (default 0).
    #[arg(long)]
    pub g2: Option<f64>,
    /// Flat key=value config file (keys: e1, delta, Delta, omega1, omega2,
    /// g1, g2); command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Clone)]
struct RawParams {
    e1: Option<f64>,
    delta: Option<f64>,
    cap_delta: Option<f64>,
    omega1: Option<f64>,
    omega2: Option<f64>,
    g1: Option<f64>,
    g2: Option<f64>,
}

fn parse_config(path: &PathBuf) -> Result<RawParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut raw = RawParams::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let value: f64 = value.trim().parse().map_err(|_| {
            CliError::Usage(format!("config line {}: bad number '{}'", lineno + 1, value.trim()))
        })?;
        match key.trim() {
            "e1" => raw.e1 = Some(value),
            "delta" => raw.delta = Some(value),
            "Delta" => raw.cap_delta = Some(value),
            "omega1" => raw.omega1 = Some(value),
            "omega2" => raw.omega2 = Some(value),
            "g1" => raw.g1 = Some(value),
            "g2" => raw.g2 = Some(value),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok(raw)
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<ModelParams, CliError> {
        let base = match &self.config {
            Some(path) => parse_config(path)?,
            None => RawParams::default(),
        };
        let pick = |flag: Option<f64>, file: Option<f64>, name: &str| -> Result<f64, CliError> {
            flag.or(file)
                .ok_or_else(|| CliError::Usage(format!("missing required parameter --{name}")))
        };
        let params = ModelParams {
            e1: self.e1.or(base.e1).unwrap_or(0.0),
            delta: pick(self.delta, base.delta, "delta")?,
            cap_delta: pick(self.cap_delta, base.cap_delta, "Delta")?,
            omega1: pick(self.omega1, base.omega1, "omega1")?,
            omega2: pick(self.omega2, base.omega2, "omega2")?,
            g1: self.g1.or(base.g1).unwrap_or(0.0),
            g2: self.g2.or(base.g2).unwrap_or(0.0),
        };
        params.validate().map_err(CliError::Validation)
    }
}
