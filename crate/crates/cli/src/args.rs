use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qi",
    version,
    about = "Gaussian quantum illumination: error bounds, sweeps and checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Mean signal photon number N_S
    #[arg(long, global = true, env = "QI_NS", allow_negative_numbers = true)]
    pub ns: Option<f64>,

    /// Mean background photon number N_B
    #[arg(long, global = true, env = "QI_NB", allow_negative_numbers = true)]
    pub nb: Option<f64>,

    /// Target reflectivity
    #[arg(long, global = true, env = "QI_KAPPA", allow_negative_numbers = true)]
    pub kappa: Option<f64>,

    /// Number of copies M (accepts forms like 1e6)
    #[arg(long, global = true, env = "QI_COPIES", value_parser = parse_copies)]
    pub copies: Option<u64>,

    /// Correlation amplitude C [default: the model's maximum]
    #[arg(long, global = true, env = "QI_C", allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// two-mode, three-mode or coherent
    #[arg(long, global = true, env = "QI_MODEL")]
    pub model: Option<String>,

    #[arg(long, global = true, env = "QI_FORMAT", value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, env = "QI_OUT")]
    pub out: Option<PathBuf>,

    /// Also write an SVG plot
    #[arg(long, global = true, env = "QI_PLOT")]
    pub plot: Option<PathBuf>,

    /// key = value file consulted for anything not given as a flag or QI_* variable
    #[arg(long, global = true, env = "QI_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bhattacharyya and Chernoff bounds for one scenario
    Bounds,
    /// Exponent ratio and optional bounds along a parameter grid
    Sweep(SweepArgs),
    /// Signal strength where the three-mode exponent meets the two-mode one
    Crossover,
    /// Covariance, symplectic spectrum and entanglement of a three-mode state
    StateInfo(StateArgs),
    /// Gaussian overlap against the truncated Fock-space oracle
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, env = "QI_PARAM", value_enum)]
    pub param: Option<SweepParam>,
    #[arg(long, env = "QI_START", allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, env = "QI_STOP", allow_negative_numbers = true)]
    pub stop: Option<f64>,
    #[arg(long, env = "QI_COUNT")]
    pub count: Option<usize>,
    #[arg(long, env = "QI_SPACING", value_enum)]
    pub spacing: Option<Spacing>,
    /// Comma-separated extra columns: qb2, qb3, qbCoherent, chernoff3
    #[arg(long, env = "QI_EXTRAS")]
    pub extras: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    #[arg(long, env = "QI_STATE", value_enum)]
    pub state: Option<StateKind>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    /// Photon-number cutoff per mode
    #[arg(long, env = "QI_CUTOFF")]
    pub cutoff: Option<usize>,
    /// Comma-separated values of s
    #[arg(long, env = "QI_S")]
    pub s: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
pub enum SweepParam {
    #[value(name = "nS")]
    #[serde(rename = "nS")]
    NS,
    #[value(name = "nB")]
    #[serde(rename = "nB")]
    NB,
    #[value(name = "kappa")]
    #[serde(rename = "kappa")]
    Kappa,
    #[value(name = "M")]
    #[serde(rename = "M")]
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Initial3,
    Rho,
    Sigma,
}

macro_rules! from_str_via_value_enum {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, false)
            }
        }
    )*};
}

from_str_via_value_enum!(Format, SweepParam, Spacing, StateKind);

/// Copies as a positive integer, allowing exact float spellings like `1e6`.
pub fn parse_copies(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.fract() == 0.0 && v >= 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("copies must be a whole number, got {s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn copies_parser() {
        assert_eq!(parse_copies("1000000"), Ok(1_000_000));
        assert_eq!(parse_copies("1e6"), Ok(1_000_000));
        assert!(parse_copies("2.5").is_err());
        assert!(parse_copies("many").is_err());
    }

    #[test]
    fn value_enums_parse_from_config_text() {
        assert_eq!("nS".parse::<SweepParam>(), Ok(SweepParam::NS));
        assert_eq!("log".parse::<Spacing>(), Ok(Spacing::Log));
        assert_eq!("json".parse::<Format>(), Ok(Format::Json));
        assert!("sideways".parse::<Spacing>().is_err());
    }
}
