//! Experiment configuration: one versioned TOML document per run.

use aniso4nls::dispersion::ModelParams;
use aniso4nls::grid::Grid;
use aniso4nls::profiles::AnalyticProfile;
use aniso4nls::scattering::decay_prediction;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Propagate,
    ProfileError,
    Scatter,
    Strichartz,
    DispersionTable,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Propagate => "propagate",
            Suite::ProfileError => "profile_error",
            Suite::Scatter => "scatter",
            Suite::Strichartz => "strichartz",
            Suite::DispersionTable => "dispersion_table",
        }
    }
}

/// Model coefficients; omit `alpha`/`beta`/`gamma` for the canonical
/// symbol |ξ|²/2 + ξ1⁴/4.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub lambda: f64,
    pub p: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ModelParams, String> {
        match (self.alpha, self.beta, self.gamma) {
            (None, None, None) => {
                ModelParams::canonical(self.lambda, self.p).map_err(|e| e.to_string())
            }
            (Some(a), Some(b), Some(g)) => {
                ModelParams::general(a, b, g, self.lambda, self.p).map_err(|e| e.to_string())
            }
            _ => Err("model: give all of alpha, beta, gamma or none".into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub half_length: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, String> {
        Grid::cubic(self.dim, self.half_length, self.n_points).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Gaussian {
        amplitude: f64,
        width: Vec<f64>,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default)]
        carrier: Vec<f64>,
    },
    Hermite {
        order: Vec<usize>,
        width: Vec<f64>,
    },
    /// Isotropic width-`width` Gaussian with amplitude calibrated so
    /// ‖ψ‖_{H^{0,s}} = target.
    CalibratedGaussian { width: f64, s: f64, target: f64 },
}

impl ProfileSpec {
    pub fn build(&self, dim: usize) -> Result<AnalyticProfile, String> {
        let p = match self {
            ProfileSpec::Gaussian {
                amplitude,
                width,
                center,
                carrier,
            } => {
                let center = if center.is_empty() { vec![0.0; width.len()] } else { center.clone() };
                let carrier = if carrier.is_empty() { vec![0.0; width.len()] } else { carrier.clone() };
                AnalyticProfile::gaussian(*amplitude, width, &center, &carrier)
            }
            ProfileSpec::Hermite { order, width } => {
                AnalyticProfile::hermite_gaussian(order, width)
            }
            ProfileSpec::CalibratedGaussian { width, s, target } => {
                AnalyticProfile::calibrated_gaussian(dim, *width, *s, *target)
            }
        }
        .map_err(|e| e.to_string())?;
        if p.dim() != dim {
            return Err(format!(
                "profile dimension {} does not match grid dimension {dim}",
                p.dim()
            ));
        }
        Ok(p)
    }
}

fn default_dt() -> f64 {
    0.01
}
fn default_true() -> bool {
    true
}
fn default_r2() -> f64 {
    2.0
}
fn default_solver_dt() -> f64 {
    0.05
}
fn default_max_iter() -> usize {
    8
}
fn default_samples() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateParams {
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_true")]
    pub tail_guard: bool,
    /// Also integrate back to the start and record the round-trip error.
    #[serde(default = "default_true")]
    pub round_trip: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileErrorParams {
    pub times: Vec<f64>,
    /// Spatial exponent of the weighted remainder norm.
    #[serde(default = "default_r2")]
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterParams {
    pub t_start: f64,
    pub t_max: f64,
    pub n_times: usize,
    /// Weight exponent of the iteration distance; defaults to the midpoint
    /// of the admissible interval.
    pub alpha: Option<f64>,
    #[serde(default = "default_solver_dt")]
    pub solver_dt: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Cross-check against the backward split-step construction.
    #[serde(default)]
    pub backward: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzParams {
    pub q: f64,
    pub r: f64,
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub d: usize,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionTableParams {
    pub entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub profile: ProfileSpec,
    pub propagate: Option<PropagateParams>,
    pub profile_error: Option<ProfileErrorParams>,
    pub scatter: Option<ScatterParams>,
    pub strichartz: Option<StrichartzParams>,
    pub dispersion_table: Option<DispersionTableParams>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural validation; emits warnings (not failures) for parameters
    /// outside the theorem ranges so exploratory runs stay possible.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err("name must be nonempty and filesystem-safe ([A-Za-z0-9_-])".into());
        }
        let m = self.model.build()?;
        let g = self.grid.build()?;
        self.profile.build(g.dim())?;
        let missing = |suite: &str| Err(format!("suite '{suite}' needs a [{suite}] table"));
        match self.suite {
            Suite::Propagate => {
                let p = match &self.propagate {
                    Some(p) => p,
                    None => return missing("propagate"),
                };
                if !(p.dt != 0.0 && p.dt.is_finite()) || !(p.t_end / p.dt > 0.0) {
                    return Err("propagate: t_end and dt must be finite, nonzero, same sign".into());
                }
            }
            Suite::ProfileError => {
                let p = match &self.profile_error {
                    Some(p) => p,
                    None => return missing("profile_error"),
                };
                if p.times.len() < 4 {
                    return Err("profile_error: need at least 4 times for a fit".into());
                }
                if p.r < 2.0 {
                    return Err("profile_error: r must be >= 2".into());
                }
            }
            Suite::Scatter => {
                let p = match &self.scatter {
                    Some(p) => p,
                    None => return missing("scatter"),
                };
                if p.n_times < 6 {
                    return Err("scatter: need at least 6 grid times".into());
                }
                match decay_prediction(g.dim(), m.p) {
                    Ok(pred) if pred.gamma > 0.0 && pred.in_theorem_range => {}
                    Ok(pred) => log::warn!(
                        "scatter outside the theorem range (d={}, p={}, gamma={:.4}): \
                         exploratory run",
                        g.dim(),
                        m.p,
                        pred.gamma
                    ),
                    Err(e) => return Err(e.to_string()),
                }
            }
            Suite::Strichartz => {
                let p = match &self.strichartz {
                    Some(p) => p,
                    None => return missing("strichartz"),
                };
                aniso4nls::metrics::AdmissiblePair::new(p.q, p.r, g.dim())
                    .map_err(|e| e.to_string())?;
                if !(p.t1 > p.t0 && p.t0 > 0.0) {
                    return Err("strichartz: need 0 < t0 < t1".into());
                }
            }
            Suite::DispersionTable => {
                let p = match &self.dispersion_table {
                    Some(p) => p,
                    None => return missing("dispersion_table"),
                };
                if p.entries.is_empty() {
                    return Err("dispersion_table: entries must be nonempty".into());
                }
            }
        }
        Ok(())
    }
}
