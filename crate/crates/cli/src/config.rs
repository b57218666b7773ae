//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ratlog_core::aak::Solver;
use ratlog_core::fourier::MethodPolicy;
use ratlog_core::symbol::{AnalyticSymbolSpec, CutoffSpec, SymbolSpec, DEFAULT_TAYLOR_DEGREE};
use ratlog_core::verify;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Predict,
    Coeffs,
    Svd,
    Distance,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Predict => "predict",
            Command::Coeffs => "coeffs",
            Command::Svd => "svd",
            Command::Distance => "distance",
            Command::Verify => "verify",
        }
    }

    fn needs_symbol(self) -> bool {
        !matches!(self, Command::Verify)
    }
}

const DEFAULT_N: usize = 256;
const DEFAULT_N_MAX: usize = 32;

/// The file as written. Missing sizes are filled in by [`Config::from_raw`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub analytic_symbol: Option<AnalyticSymbolSpec>,
    /// Cutoff used to localize an analytic symbol.
    #[serde(default)]
    pub cutoff: Option<CutoffSpec>,
    #[serde(default, rename = "J")]
    pub j: Option<usize>,
    #[serde(default, rename = "N")]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub commands: Vec<Command>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub method_policy: MethodPolicy,
    #[serde(default)]
    pub solver: Solver,
}

/// Which kind of symbol the config described.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSource {
    Boundary(SymbolSpec),
    /// Localized from an analytic symbol; `alpha` kept for reporting.
    Analytic { spec: SymbolSpec, alpha: f64 },
}

impl SymbolSource {
    pub fn spec(&self) -> &SymbolSpec {
        match self {
            SymbolSource::Boundary(s) => s,
            SymbolSource::Analytic { spec, .. } => spec,
        }
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub symbol: Option<SymbolSource>,
    pub j: usize,
    pub n: Vec<usize>,
    pub n_max: usize,
    pub k: usize,
    pub tol: f64,
    pub commands: Vec<Command>,
    pub checks: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method_policy: MethodPolicy,
    pub solver: Solver,
}

pub fn parse_str(text: &str) -> Result<RawConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config {
            path: if path == "." { "<root>".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Config::from_raw(parse_str(&text)?)
}

fn invalid(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl Config {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let symbol = match (raw.symbol, raw.analytic_symbol) {
            (Some(_), Some(_)) => return Err(invalid("<root>", "give either symbol or analytic_symbol, not both")),
            (Some(s), None) => {
                if raw.cutoff.is_some() {
                    return Err(invalid("cutoff", "only used with analytic_symbol; put the cutoff inside symbol"));
                }
                Some(SymbolSource::Boundary(s))
            }
            (None, Some(a)) => {
                let cutoff = raw.cutoff.unwrap_or_default();
                let spec = a
                    .to_symbol_spec(cutoff, DEFAULT_TAYLOR_DEGREE)
                    .map_err(|e| invalid("analytic_symbol", e.to_string()))?;
                Some(SymbolSource::Analytic { spec, alpha: a.alpha() })
            }
            (None, None) => None,
        };

        let n = raw.n.unwrap_or_else(|| vec![DEFAULT_N]);
        if n.is_empty() {
            return Err(invalid("N", "must list at least one size"));
        }
        for (i, &size) in n.iter().enumerate() {
            if !size.is_power_of_two() {
                return Err(invalid(&format!("N[{i}]"), format!("{size} is not a power of two")));
            }
        }
        let n_min = *n.iter().min().unwrap();
        let n_top = *n.iter().max().unwrap();
        let j_min = 2 * n_top - 1;
        let j = raw.j.unwrap_or(j_min);
        if j < j_min {
            return Err(invalid("J", format!("{j} is below 2 max(N) - 1 = {j_min}")));
        }
        let n_max = raw.n_max.unwrap_or(DEFAULT_N_MAX.min(n_min - 1));
        let k = raw.k.unwrap_or((n_max + 1).min(n_min));
        if n_max > k {
            return Err(invalid("n_max", format!("{n_max} exceeds k = {k}")));
        }
        if k > n_min {
            return Err(invalid("k", format!("{k} exceeds min(N) = {n_min}")));
        }
        let tol = raw.tol.unwrap_or(ratlog_core::hankel::DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
        }
        for (i, name) in raw.checks.iter().enumerate() {
            if verify::find(name).is_none() {
                return Err(invalid(
                    &format!("checks[{i}]"),
                    format!("unknown check {name:?}; known: {}", verify::check_names().join(", ")),
                ));
            }
        }
        if symbol.is_none() {
            if let Some(c) = raw.commands.iter().find(|c| c.needs_symbol()) {
                return Err(invalid("commands", format!("{} needs symbol or analytic_symbol", c.as_str())));
            }
        }
        Ok(Self {
            symbol,
            j,
            n,
            n_max,
            k,
            tol,
            commands: raw.commands,
            checks: raw.checks,
            output_dir: raw.output_dir,
            cache_dir: raw.cache_dir,
            seed: raw.seed,
            method_policy: raw.method_policy,
            solver: raw.solver,
        })
    }

    pub fn require_symbol(&self, cmd: Command) -> Result<&SymbolSource> {
        self.symbol
            .as_ref()
            .ok_or_else(|| invalid("<root>", format!("{} needs symbol or analytic_symbol", cmd.as_str())))
    }
}
