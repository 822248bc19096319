//! TOML run configuration shared by all subcommands.
//!
//! A single file describes a run; each subcommand reads the sections it
//! needs. Defaults are filled in during resolution and the fully resolved
//! config is echoed into the run manifest, so a manifest alone reproduces a
//! run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::FitConfig;
use crate::fisher::GridSpec;
use crate::mc::McConfig;
use crate::model::{ArmaParams, ModelOrder, ParamSpace};
use crate::sim::NoiseSpec;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<ModelSection>,
    pub order: Option<OrderSection>,
    pub noise: Option<NoiseSection>,
    pub space: Option<SpaceSection>,
    pub sim: Option<SimSection>,
    pub fit: Option<FitSection>,
    pub mc: Option<McSection>,
    pub grid: Option<GridSection>,
    pub select: Option<SelectSection>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub ar: Vec<f64>,
    #[serde(default)]
    pub ma: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSection {
    pub p1: usize,
    pub p2: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub kind: String,
    pub sigma2: f64,
    pub df: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub root_margin: Option<f64>,
    pub common_root_tol: Option<f64>,
    pub endpoint_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub step_tol: Option<f64>,
    pub initial_damping: Option<f64>,
    pub damping_up: Option<f64>,
    pub damping_down: Option<f64>,
    pub seed: Option<u64>,
    /// Explicit start points (concatenated AR then MA coefficients). When
    /// absent, the default multi-start set is generated from the seed.
    pub starts: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub moment_orders: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub radius: f64,
    pub points_per_axis: usize,
    /// Defaults to the model parameters.
    pub center: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectSection {
    /// Candidate orders as `[p1, p2]` pairs.
    pub candidates: Vec<[usize; 2]>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{e}")))
    }

    pub fn model_params(&self) -> Result<ArmaParams> {
        let section = self
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing [model] section".into()))?;
        ArmaParams::new(section.ar.clone(), section.ma.clone())
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn order(&self) -> Result<ModelOrder> {
        if let Some(o) = &self.order {
            return ModelOrder::new(o.p1, o.p2).map_err(|e| Error::InvalidConfig(e.to_string()));
        }
        let params = self.model_params()?;
        Ok(params.order())
    }

    pub fn noise(&self) -> Result<NoiseSpec> {
        let section = self
            .noise
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing [noise] section".into()))?;
        let spec = match section.kind.as_str() {
            "gaussian" => NoiseSpec::Gaussian {
                sigma2: section.sigma2,
            },
            "student_t" => NoiseSpec::StudentT {
                df: section
                    .df
                    .ok_or_else(|| Error::InvalidConfig("student_t noise requires df".into()))?,
                sigma2: section.sigma2,
            },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown noise kind {other:?} (expected \"gaussian\" or \"student_t\")"
                )))
            }
        };
        spec.validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(spec)
    }

    pub fn space_for(&self, order: ModelOrder) -> Result<ParamSpace> {
        let mut space = ParamSpace::defaults_for(order);
        if let Some(s) = &self.space {
            if let Some(lower) = &s.lower {
                space.lower = lower.clone();
            }
            if let Some(upper) = &s.upper {
                space.upper = upper.clone();
            }
            if let Some(v) = s.root_margin {
                space.root_margin = v;
            }
            if let Some(v) = s.common_root_tol {
                space.common_root_tol = v;
            }
            if let Some(v) = s.endpoint_tol {
                space.endpoint_tol = v;
            }
        }
        if space.lower.len() != order.p_bar() || space.upper.len() != order.p_bar() {
            return Err(Error::InvalidConfig(format!(
                "space bounds have {} coordinates but the order has {} parameters",
                space.lower.len().max(space.upper.len()),
                order.p_bar()
            )));
        }
        ParamSpace::new(
            space.lower,
            space.upper,
            space.root_margin,
            space.common_root_tol,
            space.endpoint_tol,
        )
        .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn fit_config_for(&self, order: ModelOrder, space: &ParamSpace) -> Result<FitConfig> {
        let section = self.fit.clone().unwrap_or_default();
        let seed = section.seed.unwrap_or(0);
        let starts = match &section.starts {
            Some(list) => {
                let mut starts = Vec::with_capacity(list.len());
                for v in list {
                    starts.push(
                        ArmaParams::from_slice(order, v)
                            .map_err(|e| Error::InvalidConfig(e.to_string()))?,
                    );
                }
                starts
            }
            None => crate::estimator::default_starts(order, space, seed, 5)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        };
        let mut cfg = FitConfig::with_starts(starts, seed);
        if let Some(v) = section.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = section.grad_tol {
            cfg.grad_tol = v;
        }
        if let Some(v) = section.step_tol {
            cfg.step_tol = v;
        }
        if let Some(v) = section.initial_damping {
            cfg.initial_damping = v;
        }
        if let Some(v) = section.damping_up {
            cfg.damping_up = v;
        }
        if let Some(v) = section.damping_down {
            cfg.damping_down = v;
        }
        cfg.validate()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(cfg)
    }

    pub fn grid_for(&self, model: &ArmaParams) -> Result<Option<GridSpec>> {
        match &self.grid {
            None => Ok(None),
            Some(g) => {
                let center = match &g.center {
                    Some(v) => ArmaParams::from_slice(model.order(), v)
                        .map_err(|e| Error::InvalidConfig(e.to_string()))?,
                    None => model.clone(),
                };
                GridSpec::new(center, g.radius, g.points_per_axis)
                    .map(Some)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))
            }
        }
    }

    pub fn candidates(&self) -> Result<Vec<ModelOrder>> {
        let section = self
            .select
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing [select] section".into()))?;
        if section.candidates.is_empty() {
            return Err(Error::InvalidConfig("candidate list is empty".into()));
        }
        section
            .candidates
            .iter()
            .map(|&[p1, p2]| {
                ModelOrder::new(p1, p2).map_err(|e| Error::InvalidConfig(e.to_string()))
            })
            .collect()
    }

    /// Assembles the full Monte Carlo configuration, with the master seed
    /// optionally overridden from the command line.
    pub fn mc_config(&self, seed_override: Option<u64>) -> Result<McConfig> {
        let section = self
            .mc
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing [mc] section".into()))?;
        let true_params = self.model_params()?;
        let order = true_params.order();
        let space = self.space_for(order)?;
        let fit_config = self.fit_config_for(order, &space)?;
        let grid = self.grid_for(&true_params)?;
        Ok(McConfig {
            true_params,
            order,
            space,
            noise: self.noise()?,
            sample_sizes: section.sample_sizes.clone(),
            replications: section.replications,
            master_seed: seed_override.unwrap_or(section.master_seed),
            moment_orders: section.moment_orders.clone(),
            grid,
            fit_config,
        })
    }
}
