//! Experiment configuration: a single JSON document selecting the model,
//! the scenario, the algorithm, and its parameters.
//!
//! Validation failures carry the field path that caused them, so a bad
//! config surfaces as a usage error naming e.g. `params.powers.m[3]`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use online_adp::asynchronous::{AsyncPiMode, AsyncSchedule, DelaySpec, Partition};
use online_adp::models::mdp::StageCost;
use online_adp::models::scenario::{ScenarioKind, ScenarioSpec};
use online_adp::models::MdpKernel;
use online_adp::trajectory::{AlgorithmId, ErrorInjector, PowerSchedule};

/// A config error with the offending field path.
#[derive(Debug)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(field: &str, message: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError {
        field: field.to_string(),
        message: message.into(),
    })
}

/// The model either inline or as a file reference (resolved relative to
/// the config file).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    Inline(MdpKernel),
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    pub base_cost: StageCost,
    /// Defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Defaults to the experiment horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MagnitudeSpec {
    Constant { constant: f64 },
    List { list: Vec<f64> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InjectionConfig {
    #[serde(flatten)]
    pub magnitudes: Option<MagnitudeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InjectionConfig {
    pub fn build(
        cfg: Option<&InjectionConfig>,
        horizon: usize,
        default_seed: u64,
        field: &str,
    ) -> Result<ErrorInjector, UsageError> {
        let Some(cfg) = cfg else {
            return Ok(ErrorInjector::zero(horizon));
        };
        let seed = cfg.seed.unwrap_or(default_seed);
        let built = match &cfg.magnitudes {
            None => Ok(ErrorInjector::zero(horizon)),
            Some(MagnitudeSpec::Constant { constant }) => {
                ErrorInjector::constant(horizon, *constant, seed)
            }
            Some(MagnitudeSpec::List { list }) => {
                if list.len() < horizon {
                    return usage(
                        field,
                        format!(
                            "magnitude list covers {} steps, horizon is {horizon}",
                            list.len()
                        ),
                    );
                }
                ErrorInjector::from_list(list.clone(), seed)
            }
        };
        built.map_err(|e| UsageError {
            field: field.to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowersConfig {
    Constant(usize),
    Cycle(Vec<usize>),
    List(Vec<usize>),
}

impl PowersConfig {
    pub fn build(
        cfg: Option<&PowersConfig>,
        horizon: usize,
        field: &str,
    ) -> Result<PowerSchedule, UsageError> {
        let built = match cfg {
            None => PowerSchedule::constant(horizon, 1),
            Some(PowersConfig::Constant(m)) => PowerSchedule::constant(horizon, *m),
            Some(PowersConfig::Cycle(pattern)) => PowerSchedule::cycle(horizon, pattern),
            Some(PowersConfig::List(list)) => {
                if list.len() < horizon {
                    return usage(
                        field,
                        format!(
                            "power list covers {} steps, horizon is {horizon}",
                            list.len()
                        ),
                    );
                }
                PowerSchedule::from_list(list.clone())
            }
        };
        // PowerSchedule errors already carry "powers.m[k]: ..." text.
        built.map_err(|e| UsageError {
            field: field.to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionConfig {
    /// Contiguous blocks of near-equal size.
    Blocks(usize),
    /// Explicit state → processor assignment.
    Assignment {
        assignment: Vec<usize>,
        n_processors: usize,
    },
}

impl PartitionConfig {
    pub fn build(&self, n_states: usize, field: &str) -> Result<Partition, UsageError> {
        match self {
            PartitionConfig::Blocks(n) => Partition::blocks(n_states, *n),
            PartitionConfig::Assignment {
                assignment,
                n_processors,
            } => Partition::new(assignment.clone(), *n_processors),
        }
        .map_err(|e| UsageError {
            field: field.to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleConfig {
    /// Round-robin VI activations with configurable delays.
    RoundRobin {
        t_a: usize,
        t_d: usize,
        #[serde(default)]
        delays: Option<DelaySpec>,
    },
    /// Seeded activation gaps in `[1, t_a+1]` and seeded delays.
    Seeded {
        t_a: usize,
        t_d: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// PI schedule with period 2N (improve/evaluate interleaved).
    Alternating { t_a: usize },
    /// PI schedule where every processor improves at even ticks and
    /// evaluates at odd ticks.
    DenseAlternating { t_a: usize },
    /// Fully explicit activation lists and delays.
    Explicit {
        improve: Vec<BTreeSet<usize>>,
        #[serde(default)]
        evaluate: Vec<BTreeSet<usize>>,
        delays: DelaySpec,
        t_a: usize,
        t_d: usize,
    },
}

impl ScheduleConfig {
    pub fn build(&self, n_processors: usize, horizon: usize, master_seed: u64) -> AsyncSchedule {
        match self {
            ScheduleConfig::RoundRobin { t_a, t_d, delays } => AsyncSchedule::round_robin_vi(
                n_processors,
                horizon,
                *t_a,
                *t_d,
                delays.clone().unwrap_or(DelaySpec::Zero),
            ),
            ScheduleConfig::Seeded { t_a, t_d, seed } => AsyncSchedule::seeded_vi(
                n_processors,
                horizon,
                *t_a,
                *t_d,
                seed.unwrap_or(master_seed),
            ),
            ScheduleConfig::Alternating { t_a } => {
                AsyncSchedule::alternating_pi(n_processors, horizon, *t_a)
            }
            ScheduleConfig::DenseAlternating { t_a } => {
                AsyncSchedule::dense_alternating_pi(n_processors, horizon, *t_a)
            }
            ScheduleConfig::Explicit {
                improve,
                evaluate,
                delays,
                t_a,
                t_d,
            } => AsyncSchedule {
                improve: improve.clone(),
                evaluate: evaluate.clone(),
                delays: delays.clone(),
                t_a: *t_a,
                t_d: *t_d,
            },
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AlgoParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<PowersConfig>,
    /// Operator-approximation magnitudes (`e_k`) for the VI family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection: Option<InjectionConfig>,
    /// Evaluation-side magnitudes (`δ_{1,k}` / `δ_k`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_injection: Option<InjectionConfig>,
    /// Improvement-side ceilings (`ε_{1,k}` / `ε_k`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub improve_injection: Option<InjectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AsyncPiMode>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TailConfig {
    pub burn_in_fraction: f64,
    pub window_fraction: f64,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig {
            burn_in_fraction: 0.3,
            window_fraction: 0.2,
        }
    }
}

fn default_drift_samples() -> usize {
    8
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    pub scenario: ScenarioConfig,
    pub algorithm: AlgorithmId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: AlgoParams,
    #[serde(default)]
    pub tail: TailConfig,
    #[serde(default = "default_drift_samples")]
    pub drift_samples: usize,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<(Self, serde_json::Value)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("config is not valid JSON: {e}"))?;
        let config: ExperimentConfig = serde_json::from_value(value.clone())
            .map_err(|e| anyhow::anyhow!("config does not match the schema: {e}"))?;
        Ok((config, value))
    }

    /// Loads the kernel, resolving file references relative to `base_dir`.
    pub fn load_kernel(&self, base_dir: &Path) -> anyhow::Result<MdpKernel> {
        match &self.model {
            ModelSource::Inline(kernel) => Ok(kernel.clone()),
            ModelSource::File(rel) => {
                let path = if rel.is_absolute() {
                    rel.clone()
                } else {
                    base_dir.join(rel)
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| anyhow::anyhow!("model.file {}: {e}", path.display()))?;
                Ok(serde_json::from_str(&text)
                    .map_err(|e| anyhow::anyhow!("model.file {}: {e}", path.display()))?)
            }
        }
    }

    /// The effective horizon, reconciling `horizon` and `scenario.horizon`.
    pub fn resolve_horizon(&self) -> Result<usize, UsageError> {
        let horizon = match (self.horizon, self.scenario.horizon) {
            (Some(a), Some(b)) if a != b => {
                return usage(
                    "horizon",
                    format!("conflicts with scenario.horizon ({a} vs {b})"),
                );
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return usage("horizon", "missing (set horizon or scenario.horizon)"),
        };
        if horizon < 1 {
            return usage("horizon", "must be ≥ 1");
        }
        Ok(horizon)
    }

    /// The scenario spec with seed and horizon resolved.
    pub fn resolve_scenario(&self, seed: u64) -> Result<ScenarioSpec, UsageError> {
        let horizon = self.resolve_horizon()?;
        Ok(ScenarioSpec {
            kind: self.scenario.kind.clone(),
            base_cost: self.scenario.base_cost.clone(),
            seed: self.scenario.seed.unwrap_or(seed),
            horizon,
        })
    }
}
