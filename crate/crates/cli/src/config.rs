//! Run configuration: one JSON document, unknown keys rejected.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use susyqm::{build_jc, make_grid, FockSpace, Grid, JcSystem, Superpotential, SusySystem};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Entangle,
    Supercharge,
    Jc,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Entangle => "entangle",
            Command::Supercharge => "supercharge",
            Command::Jc => "jc",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperpotentialConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub c1_abs: Vec<f64>,
    pub phase: Vec<f64>,
}

impl Default for CoefficientConfig {
    /// 21 moduli on `[0, 1]` times 8 phases `k * 2 pi / 8`.
    fn default() -> Self {
        Self {
            c1_abs: (0..=20).map(|i| i as f64 / 20.0).collect(),
            phase: (0..8).map(|k| k as f64 * TAU / 8.0).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcParams {
    pub omega: f64,
    pub gamma: f64,
    pub n_max: usize,
}

impl Default for JcParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma: 0.1,
            n_max: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub superpotential: Option<SuperpotentialConfig>,
    pub grid: Option<GridConfig>,
    pub levels: Option<usize>,
    pub coefficients: Option<CoefficientConfig>,
    pub jc_params: Option<JcParams>,
    #[serde(default)]
    pub output: OutputConfig,
}

pub const DEFAULT_LEVELS: usize = 6;

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {msg}"))
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("{v} is not finite")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn required<'a, T>(&self, value: &'a Option<T>, field: &str) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| {
            CliError::Config(format!(
                "missing field `{field}` (required by `{}`)",
                self.command.as_str()
            ))
        })
    }

    /// Checks every field the command needs before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let needs_susy = self.command != Command::Jc;
        if needs_susy {
            let grid = self.grid_checked()?;
            self.superpotential()?;
            let levels = self.levels();
            let max = grid.n_points() / 10;
            if levels == 0 || levels + 1 > max {
                return Err(invalid(
                    "levels",
                    format!("{levels} must lie in 1..={} (10% of the grid, less one for the zero mode)", max.saturating_sub(1)),
                ));
            }
        }
        if self.command == Command::Entangle {
            let c = self.coefficients();
            if c.c1_abs.is_empty() || c.phase.is_empty() {
                return Err(invalid("coefficients", "sweep lists must be non-empty"));
            }
            for &a in &c.c1_abs {
                finite("coefficients.c1_abs", a)?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(invalid("coefficients.c1_abs", format!("{a} is outside [0, 1]")));
                }
            }
            for &p in &c.phase {
                finite("coefficients.phase", p)?;
            }
        }
        if self.command == Command::Jc {
            self.required(&self.jc_params, "jc_params")?;
        }
        if self.command == Command::Jc || self.jc_params.is_some() {
            self.jc_system()?;
        }
        Ok(())
    }

    fn grid_checked(&self) -> Result<Grid, CliError> {
        let g = self.required(&self.grid, "grid")?;
        finite("grid.x_min", g.x_min)?;
        finite("grid.x_max", g.x_max)?;
        make_grid(g.x_min, g.x_max, g.n_points).map_err(|e| invalid("grid", e))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        self.grid_checked()
    }

    pub fn superpotential(&self) -> Result<Superpotential, CliError> {
        let w = self.required(&self.superpotential, "superpotential")?;
        Superpotential::from_name(&w.name, &w.params).map_err(|e| invalid("superpotential", e))
    }

    pub fn susy_system(&self) -> Result<SusySystem, CliError> {
        SusySystem::new(self.superpotential()?, self.grid()?).map_err(|e| invalid("superpotential", e))
    }

    pub fn levels(&self) -> usize {
        self.levels.unwrap_or(DEFAULT_LEVELS)
    }

    pub fn coefficients(&self) -> CoefficientConfig {
        self.coefficients.clone().unwrap_or_default()
    }

    pub fn jc_system(&self) -> Result<JcSystem, CliError> {
        let p = self.jc_params.unwrap_or_default();
        finite("jc_params.omega", p.omega)?;
        finite("jc_params.gamma", p.gamma)?;
        if p.n_max < FockSpace::MIN_CUTOFF {
            return Err(invalid(
                "jc_params.n_max",
                format!("{} is below the minimum {}", p.n_max, FockSpace::MIN_CUTOFF),
            ));
        }
        build_jc(p.omega, p.gamma, p.n_max).map_err(|e| invalid("jc_params", e))
    }
}
