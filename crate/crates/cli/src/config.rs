//! Run configuration: per-command defaults, an optional `key = value`
//! file with `[section]` headers, and command-line overrides, applied in
//! that order.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nhspec::pseudospectral::Grid2D;
use nhspec::sweep::SweepConfig;
use nhspec::{Basis1D, Method, ModelParams, Perturbation, ProductBasis};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Table0,
    Sweep,
    Ep,
    Validate,
    C4vDemo,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Table0,
        Command::Sweep,
        Command::Ep,
        Command::Validate,
        Command::C4vDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Table0 => "table0",
            Command::Sweep => "sweep",
            Command::Ep => "ep",
            Command::Validate => "validate",
            Command::C4vDemo => "c4v-demo",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub perturbation: Perturbation,
    pub method: Method,
    pub basis_size: usize,
    pub basis_scale_x: Option<f64>,
    pub basis_scale_y: Option<f64>,
    pub grid_n: usize,
    pub grid_l: f64,
    pub lambda: f64,
    pub lambda_start: f64,
    pub lambda_end: f64,
    pub lambda_steps: usize,
    /// Coupling list for `validate`.
    pub lambdas: Vec<f64>,
    pub levels: usize,
    pub reality_eps: f64,
    /// Tolerance of the command's main check.
    pub tol: f64,
    pub ep_tol: f64,
    pub digits: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Every key accepted in a config file; flags use the same names.
pub const KEYS: &[&str] = &[
    "alpha-x",
    "alpha-y",
    "perturbation",
    "method",
    "basis-size",
    "basis-scale-x",
    "basis-scale-y",
    "grid-n",
    "grid-l",
    "lambda",
    "lambda-start",
    "lambda-end",
    "lambda-steps",
    "lambdas",
    "levels",
    "reality-eps",
    "tol",
    "ep-tol",
    "digits",
    "format",
    "out",
];

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let mut c = RunConfig {
            command,
            alpha_x: 1.0,
            alpha_y: std::f64::consts::SQRT_2,
            perturbation: Perturbation::X2yPlusXy2,
            method: Method::BasisDm,
            basis_size: 16,
            basis_scale_x: None,
            basis_scale_y: None,
            grid_n: 32,
            grid_l: 4.0,
            lambda: 0.01,
            lambda_start: 0.0,
            lambda_end: 1.0,
            lambda_steps: 201,
            lambdas: vec![0.0, 0.1, 0.5],
            levels: 8,
            reality_eps: nhspec::eigensolver::DEFAULT_REALITY_EPS,
            tol: 1e-8,
            ep_tol: 1e-8,
            digits: nhspec::oracle1d::MAX_DIGITS,
            format: Format::Csv,
            out: None,
        };
        match command {
            Command::Table0 => {
                c.basis_size = 50;
                c.levels = 23;
                c.tol = 1e-10;
            }
            Command::Sweep => {}
            Command::Ep => {
                c.lambda_end = 2.0;
                c.lambda_steps = 81;
                c.ep_tol = 1e-10;
            }
            Command::Validate => {
                c.perturbation = Perturbation::Xy;
                c.basis_size = 24;
            }
            Command::C4vDemo => {
                c.alpha_y = 1.0;
                c.perturbation = Perturbation::Xy;
                c.basis_size = 20;
                c.tol = 1e-6;
            }
        }
        c
    }

    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        let bad = |why: String| CliError::Config(format!("invalid value {v:?} for {key}: {why}"));
        fn num<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| e.to_string())
        }
        match key.as_str() {
            "alpha-x" => self.alpha_x = num(v).map_err(bad)?,
            "alpha-y" => self.alpha_y = num(v).map_err(bad)?,
            "perturbation" => self.perturbation = v.parse().map_err(|e| bad(format!("{e}")))?,
            "method" => self.method = v.parse().map_err(|e| bad(format!("{e}")))?,
            "basis-size" => self.basis_size = num(v).map_err(bad)?,
            "basis-scale-x" => self.basis_scale_x = Some(num(v).map_err(bad)?),
            "basis-scale-y" => self.basis_scale_y = Some(num(v).map_err(bad)?),
            "grid-n" => self.grid_n = num(v).map_err(bad)?,
            "grid-l" => self.grid_l = num(v).map_err(bad)?,
            "lambda" => self.lambda = num(v).map_err(bad)?,
            "lambda-start" => self.lambda_start = num(v).map_err(bad)?,
            "lambda-end" => self.lambda_end = num(v).map_err(bad)?,
            "lambda-steps" => self.lambda_steps = num(v).map_err(bad)?,
            "lambdas" => {
                self.lambdas = v
                    .split(',')
                    .map(|s| num(s.trim()))
                    .collect::<Result<_, _>>()
                    .map_err(bad)?
            }
            "levels" => self.levels = num(v).map_err(bad)?,
            "reality-eps" => self.reality_eps = num(v).map_err(bad)?,
            "tol" => self.tol = num(v).map_err(bad)?,
            "ep-tol" => self.ep_tol = num(v).map_err(bad)?,
            "digits" => self.digits = num(v).map_err(bad)?,
            "format" => self.format = v.parse().map_err(bad)?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => {
                return Err(CliError::Config(format!(
                    "unknown key {key:?} (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Apply the entries of a config file that concern this command: keys
    /// before any section header, then those of `[common]`, then those of
    /// the command's own section.
    pub fn apply_file(&mut self, file: &ConfigFile) -> Result<(), CliError> {
        for section in ["", "common", self.command.name()] {
            for e in file.entries.iter().filter(|e| e.section == section) {
                self.set(&e.key, &e.value).map_err(|err| match err {
                    CliError::Config(m) => CliError::Config(format!("line {}: {m}", e.line)),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    pub fn model(&self, lambda: f64) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            self.alpha_x,
            self.alpha_y,
            self.perturbation,
            lambda,
        )?)
    }

    pub fn product_basis(&self) -> Result<ProductBasis, CliError> {
        let p = self.model(0.0)?;
        let bx = self
            .basis_scale_x
            .unwrap_or_else(|| Basis1D::quartic_default_scale(p.alpha_x, self.basis_size));
        let by = self
            .basis_scale_y
            .unwrap_or_else(|| Basis1D::quartic_default_scale(p.alpha_y, self.basis_size));
        let b = ProductBasis::new(
            Basis1D::new(self.basis_size, bx)?,
            Basis1D::new(self.basis_size, by)?,
        );
        b.check_limit()?;
        Ok(b)
    }

    pub fn grid(&self) -> Result<Grid2D, CliError> {
        let g = Grid2D::new(self.grid_l, self.grid_n)?;
        g.check_limit()?;
        Ok(g)
    }

    pub fn discretization(&self) -> Result<nhspec::Discretization, CliError> {
        Ok(match self.method {
            Method::BasisDm => nhspec::Discretization::Basis(self.product_basis()?),
            Method::Pseudospectral => nhspec::Discretization::Grid(self.grid()?),
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        Ok(SweepConfig::new(
            self.lambda_start,
            self.lambda_end,
            self.lambda_steps,
            self.levels,
        )?
        .with_reality_eps(self.reality_eps)?
        .with_ep_tol(self.ep_tol)?)
    }

    /// Check every field the command uses against the owning type.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        self.model(0.0)?;
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!(
                "tol must be non-negative, got {}",
                self.tol
            )));
        }
        positive("reality-eps", self.reality_eps)?;
        if self.levels == 0 {
            return Err(CliError::Config("levels must be at least 1".into()));
        }
        match self.command {
            Command::Table0 => {
                self.product_basis()?;
                if !(1..=nhspec::oracle1d::MAX_DIGITS).contains(&self.digits) {
                    return Err(CliError::Config(format!(
                        "digits must lie in 1..={}",
                        nhspec::oracle1d::MAX_DIGITS
                    )));
                }
            }
            Command::Sweep | Command::Ep => {
                self.discretization()?;
                self.sweep_config()?;
            }
            Command::Validate => {
                self.product_basis()?;
                self.grid()?;
                if self.lambdas.is_empty() {
                    return Err(CliError::Config("lambdas must not be empty".into()));
                }
                for &l in &self.lambdas {
                    self.model(l)?;
                }
            }
            Command::C4vDemo => {
                self.product_basis()?;
                self.model(self.lambda)?;
                positive("lambda", self.lambda)?;
            }
        }
        Ok(())
    }

    /// Full echo for output metadata.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command.name(),
            "alpha-x": self.alpha_x,
            "alpha-y": self.alpha_y,
            "perturbation": self.perturbation.name(),
            "method": self.method.name(),
            "basis-size": self.basis_size,
            "basis-scale-x": self.basis_scale_x,
            "basis-scale-y": self.basis_scale_y,
            "grid-n": self.grid_n,
            "grid-l": self.grid_l,
            "lambda": self.lambda,
            "lambda-start": self.lambda_start,
            "lambda-end": self.lambda_end,
            "lambda-steps": self.lambda_steps,
            "lambdas": self.lambdas,
            "levels": self.levels,
            "reality-eps": self.reality_eps,
            "tol": self.tol,
            "ep-tol": self.ep_tol,
            "digits": self.digits,
            "format": self.format.extension(),
            "out": self.out.as_ref().map(|p| p.display().to_string()),
        })
    }

    /// The same echo as `key = value` lines.
    pub fn echo_lines(&self) -> Vec<String> {
        let Value::Object(map) = self.to_json() else {
            unreachable!()
        };
        map.iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k} = {s}"),
                Value::Null => format!("{k} = auto"),
                Value::Array(a) => format!(
                    "{k} = {}",
                    a.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
                other => format!("{k} = {other}"),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: Vec<ConfigEntry>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut section = String::new();
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config(format!("line {}: unclosed section", i + 1)))?
                    .trim();
                if name != "common" && !Command::ALL.iter().any(|c| c.name() == name) {
                    return Err(CliError::Config(format!(
                        "line {}: unknown section [{name}]",
                        i + 1
                    )));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "line {}: unknown key {key:?}",
                    i + 1
                )));
            }
            entries.push(ConfigEntry {
                section: section.clone(),
                key,
                value: value.trim().to_string(),
                line: i + 1,
            });
        }
        Ok(Self { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_precedence() {
        let f = ConfigFile::parse(
            "levels = 4\n[common]\nbasis-size = 12 # comment\n[sweep]\nlevels = 6\n[table0]\nlevels = 2\n",
        )
        .unwrap();
        let mut c = RunConfig::defaults(Command::Sweep);
        c.apply_file(&f).unwrap();
        assert_eq!(c.levels, 6);
        assert_eq!(c.basis_size, 12);
        c.set("levels", "9").unwrap();
        assert_eq!(c.levels, 9);
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(ConfigFile::parse("[nope]\n").is_err());
        assert!(ConfigFile::parse("levels 4\n").is_err());
        assert!(ConfigFile::parse("colour = red\n").is_err());
        let f = ConfigFile::parse("levels = many\n").unwrap();
        let mut c = RunConfig::defaults(Command::Sweep);
        let err = c.apply_file(&f).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn degenerate_sweep_range_rejected() {
        let mut c = RunConfig::defaults(Command::Sweep);
        c.lambda_end = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn lambda_list() {
        let mut c = RunConfig::defaults(Command::Validate);
        c.set("lambdas", "0, 0.25,1").unwrap();
        assert_eq!(c.lambdas, vec![0.0, 0.25, 1.0]);
    }
}
