use std::path::{Path, PathBuf};

use eigencomplete::{make_initial, Branch, ExpansionOptions, Family, InitialKind, InitialState, Potential};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: Potential,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialKind>,
    #[serde(default)]
    pub numerics: ExpansionOptions,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Bands {
        energy_max: f64,
        #[serde(default = "default_samples")]
        samples_per_band: usize,
    },
    Eigenstate {
        energy: f64,
        /// Required for non-periodic potentials.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<Family>,
        /// Bloch branch for periodic potentials.
        #[serde(default = "default_branch")]
        branch: Branch,
        #[serde(default = "default_x_min")]
        x_min: f64,
        #[serde(default = "default_x_max")]
        x_max: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Grid defaults to the initial-state support.
    Expand {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
        #[serde(default = "default_points")]
        points: usize,
    },
    Probability,
    Table1 {
        #[serde(default = "default_table_tau")]
        tau: f64,
        #[serde(default = "default_table_sigma")]
        sigma: f64,
        #[serde(default = "default_table_rows")]
        rows: u32,
    },
    Identity {
        sigma: f64,
    },
    Oracle {
        half_width: f64,
        n: usize,
    },
}

fn default_samples() -> usize {
    60
}
fn default_branch() -> Branch {
    Branch::Plus
}
fn default_x_min() -> f64 {
    -5.0
}
fn default_x_max() -> f64 {
    5.0
}
fn default_points() -> usize {
    201
}
fn default_table_tau() -> f64 {
    -0.38
}
fn default_table_sigma() -> f64 {
    1.25
}
fn default_table_rows() -> u32 {
    6
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Bands { .. } => "bands",
            Task::Eigenstate { .. } => "eigenstate",
            Task::Expand { .. } => "expand",
            Task::Probability => "probability",
            Task::Table1 { .. } => "table1",
            Task::Identity { .. } => "identity",
            Task::Oracle { .. } => "oracle",
        }
    }

    fn needs_initial_state(&self) -> bool {
        matches!(self, Task::Expand { .. } | Task::Probability | Task::Oracle { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("output"), formats: vec![Format::Csv, Format::Json, Format::Svg] }
    }
}

/// Global command-line overrides.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub edge_margin: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::invalid(format!("config {}: {e}", path.display())))
    }

    /// `--tol` sets the probability tolerance for probability-type tasks and
    /// the pointwise cutoff tolerance otherwise.
    pub fn apply(&mut self, o: Overrides) {
        if let Some(t) = o.tol {
            match self.task {
                Task::Probability | Task::Table1 { .. } => self.numerics.probability_tol = t,
                _ => self.numerics.cutoff_tol = t,
            }
        }
        if let Some(m) = o.edge_margin {
            self.numerics.edge_margin = m;
        }
    }

    /// Checks every invariant that can be checked before computing and
    /// builds the initial state when one is given.
    pub fn validate(&self) -> Result<Option<InitialState>, CliError> {
        self.potential.validate().map_err(|e| CliError::invalid(format!("potential: {e}")))?;
        let n = &self.numerics;
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::invalid(format!("numerics.{key} must be positive, got {v}")))
            }
        };
        positive("cutoff_tol", n.cutoff_tol)?;
        positive("probability_tol", n.probability_tol)?;
        if !(n.edge_margin >= 0.0 && n.edge_margin < 0.5) {
            return Err(CliError::invalid(format!("numerics.edge_margin must lie in [0, 0.5), got {}", n.edge_margin)));
        }
        if let Some(c) = n.initial_cutoff {
            positive("initial_cutoff", c)?;
        }
        if !(2..=64).contains(&n.order) {
            return Err(CliError::invalid(format!("numerics.order must lie in 2..=64, got {}", n.order)));
        }
        if self.output.formats.is_empty() {
            return Err(CliError::invalid("output.formats must name at least one of csv, json, svg".into()));
        }
        match self.task {
            Task::Bands { energy_max, samples_per_band } => {
                positive("task.energy_max", energy_max).map_err(|_| {
                    CliError::invalid(format!("task.energy_max must be positive, got {energy_max}"))
                })?;
                if samples_per_band < 2 {
                    return Err(CliError::invalid("task.samples_per_band must be at least 2".into()));
                }
            }
            Task::Eigenstate { energy, family, x_min, x_max, points, .. } => {
                if !energy.is_finite() {
                    return Err(CliError::invalid("task.energy must be finite".into()));
                }
                if self.potential.period().is_none() && family.is_none() {
                    return Err(CliError::invalid(format!(
                        "task.family is required for the non-periodic potential {}",
                        self.potential.name()
                    )));
                }
                grid_check(x_min, x_max, points)?;
            }
            Task::Expand { x_min, x_max, points } => {
                if let (Some(a), Some(b)) = (x_min, x_max) {
                    grid_check(a, b, points)?;
                } else if points < 2 {
                    return Err(CliError::invalid("task.points must be at least 2".into()));
                }
            }
            Task::Table1 { sigma, rows, .. } => {
                if !matches!(self.potential, Potential::KronigPenney { .. }) {
                    return Err(CliError::invalid(format!(
                        "task table1 needs a kronig_penney potential, got {}",
                        self.potential.name()
                    )));
                }
                if !(sigma > 0.0) || rows == 0 {
                    return Err(CliError::invalid("task.sigma and task.rows must be positive".into()));
                }
            }
            Task::Identity { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(CliError::invalid(format!("task.sigma must be positive, got {sigma}")));
                }
            }
            Task::Oracle { half_width, n } => {
                if !(half_width > 0.0) {
                    return Err(CliError::invalid(format!("task.half_width must be positive, got {half_width}")));
                }
                if n < 2 {
                    return Err(CliError::invalid(format!("task.n must be at least 2, got {n}")));
                }
            }
            Task::Probability => {}
        }
        match (self.initial_state, self.task.needs_initial_state()) {
            (None, true) => Err(CliError::invalid(format!("initial_state is required by task {}", self.task.name()))),
            (None, false) => Ok(None),
            (Some(kind), _) => make_initial(kind).map(Some).map_err(|e| CliError::invalid(format!("initial_state: {e}"))),
        }
    }
}

fn grid_check(lo: f64, hi: f64, points: usize) -> Result<(), CliError> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::invalid(format!("task.x_min must be below task.x_max, got {lo} and {hi}")));
    }
    if points < 2 {
        return Err(CliError::invalid("task.points must be at least 2".into()));
    }
    Ok(())
}

pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }).collect()
}
