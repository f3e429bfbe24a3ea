//! Command-line driver for `nhspec`: regenerates the unperturbed level
//! table, runs coupling sweeps, locates exceptional points, cross-checks
//! the two discretizations and demonstrates the square-oscillator case.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{build_report, execute};
pub use config::{Command, ConfigFile, Format, RunConfig};
pub use output::{Check, Report, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nhspec::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "nhspec",
    version,
    about = "Spectra of non-Hermitian 2D quartic oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Lowest levels of H0 from the 1D oracle, compared with the basis method
    Table0(Flags),
    /// Track the lowest levels over a coupling range
    Sweep(Flags),
    /// Locate exceptional points over a coupling range
    Ep(Flags),
    /// Compare basis and grid spectra at several couplings
    Validate(Flags),
    /// E doublets of the square oscillator under W = xy
    #[command(name = "c4v-demo")]
    C4vDemo(Flags),
}

/// Flags shared by every subcommand. Values are checked when applied.
#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha_x: Option<String>,
    #[arg(long)]
    pub alpha_y: Option<String>,
    /// xy, x2y, xy2 or x2y+xy2
    #[arg(long)]
    pub perturbation: Option<String>,
    /// basis-dm or pseudospectral
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub basis_size: Option<String>,
    #[arg(long)]
    pub basis_scale_x: Option<String>,
    #[arg(long)]
    pub basis_scale_y: Option<String>,
    #[arg(long)]
    pub grid_n: Option<String>,
    #[arg(long)]
    pub grid_l: Option<String>,
    /// Single coupling (c4v-demo)
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub lambda_start: Option<String>,
    #[arg(long)]
    pub lambda_end: Option<String>,
    #[arg(long)]
    pub lambda_steps: Option<String>,
    /// Comma-separated couplings (validate)
    #[arg(long)]
    pub lambdas: Option<String>,
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub reality_eps: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub ep_tol: Option<String>,
    /// Significant digits of oracle values (table0)
    #[arg(long)]
    pub digits: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (a directory for sweep)
    #[arg(long)]
    pub out: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all: [(&'static str, &Option<String>); 21] = [
            ("alpha-x", &self.alpha_x),
            ("alpha-y", &self.alpha_y),
            ("perturbation", &self.perturbation),
            ("method", &self.method),
            ("basis-size", &self.basis_size),
            ("basis-scale-x", &self.basis_scale_x),
            ("basis-scale-y", &self.basis_scale_y),
            ("grid-n", &self.grid_n),
            ("grid-l", &self.grid_l),
            ("lambda", &self.lambda),
            ("lambda-start", &self.lambda_start),
            ("lambda-end", &self.lambda_end),
            ("lambda-steps", &self.lambda_steps),
            ("lambdas", &self.lambdas),
            ("levels", &self.levels),
            ("reality-eps", &self.reality_eps),
            ("tol", &self.tol),
            ("ep-tol", &self.ep_tol),
            ("digits", &self.digits),
            ("format", &self.format),
            ("out", &self.out),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let (command, flags) = match &cli.command {
        Sub::Table0(f) => (Command::Table0, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Ep(f) => (Command::Ep, f),
        Sub::Validate(f) => (Command::Validate, f),
        Sub::C4vDemo(f) => (Command::C4vDemo, f),
    };
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_file(&ConfigFile::parse(&text)?)?;
    }
    for (k, v) in flags.pairs() {
        cfg.set(k, v)
            .map_err(|e| CliError::Config(format!("--{k}: {e}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse arguments and build the run configuration.
pub fn config_from_args<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    resolve(&cli)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let c =
            config_from_args(["nhspec", "sweep", "--levels", "4", "--perturbation", "xy"]).unwrap();
        assert_eq!(c.command, Command::Sweep);
        assert_eq!(c.levels, 4);
        assert_eq!(c.perturbation, nhspec::Perturbation::Xy);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("nhspec-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "[validate]\nlevels = 5\ntol = 1e-6\n").unwrap();
        let p = path.to_str().unwrap();
        let c = config_from_args(["nhspec", "validate", "--config", p, "--tol", "1e-7"]).unwrap();
        assert_eq!(c.levels, 5);
        assert_eq!(c.tol, 1e-7);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(config_from_args(["nhspec", "sweep", "--levels", "x"]).is_err());
        assert!(config_from_args(["nhspec", "sweep", "--alpha-x", "-1"]).is_err());
        assert!(config_from_args(["nhspec", "sweep", "--lambda-end", "0"]).is_err());
        assert!(config_from_args(["nhspec", "table0", "--format", "xml"]).is_err());
    }
}
