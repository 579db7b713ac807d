//! Seeded time-varying scenario generators.
//!
//! A scenario turns a base stage cost into the revealed sequence
//! `g_0, …, g_{K−1}` whose per-step drift is finite and measurable:
//! static, sinusoidal uniform offset, bounded random walk, or
//! piecewise-constant regime switches.

use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};
use crate::models::mdp::{validate_stage, MdpKernel, StageCost, StageSequence};
use crate::seeded;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// All stages equal the base cost.
    Static,
    /// `g_k = base + amplitude·sin(2πk/period)` applied uniformly to all
    /// entries, so the offset passes through the probability-weighted sum
    /// unchanged and drift constants stay analytically predictable.
    Sinusoidal { amplitude: f64, period: usize },
    /// Each entry of `g_{k+1}` differs from `g_k` by an independent
    /// seeded uniform step in `[−step_bound, step_bound]`, keyed by
    /// `(seed, k, x, u, y)` so the draw order never matters.
    BoundedRandomWalk { step_bound: f64 },
    /// Starts at the base cost and switches to the listed costs at the
    /// listed (strictly ascending) times.
    PiecewiseConstant { switches: Vec<Switch> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Switch {
    pub at: usize,
    pub cost: StageCost,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    pub base_cost: StageCost,
    pub seed: u64,
    pub horizon: usize,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(AdpError::Contract("scenario horizon must be ≥ 1".into()));
        }
        match &self.kind {
            ScenarioKind::Static => {}
            ScenarioKind::Sinusoidal { amplitude, period } => {
                if *period < 1 {
                    return Err(AdpError::Contract("sinusoidal period must be ≥ 1".into()));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(AdpError::Contract(format!(
                        "sinusoidal amplitude must be nonnegative, got {amplitude}"
                    )));
                }
            }
            ScenarioKind::BoundedRandomWalk { step_bound } => {
                if !(step_bound.is_finite() && *step_bound >= 0.0) {
                    return Err(AdpError::Contract(format!(
                        "random-walk step bound must be nonnegative, got {step_bound}"
                    )));
                }
            }
            ScenarioKind::PiecewiseConstant { switches } => {
                if !switches.windows(2).all(|w| w[0].at < w[1].at) {
                    return Err(AdpError::Contract(
                        "piecewise switch times must be strictly ascending".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The configured ceiling on per-step entrywise cost drift, where one
    /// exists: `amplitude·2π/period` for the sinusoid (derivative bound),
    /// `step_bound` for the walk, 0 for static. Piecewise switches are
    /// unbounded jumps, so no ceiling is claimed.
    pub fn step_ceiling(&self) -> Option<f64> {
        match &self.kind {
            ScenarioKind::Static => Some(0.0),
            ScenarioKind::Sinusoidal { amplitude, period } => {
                Some(amplitude * 2.0 * std::f64::consts::PI / *period as f64)
            }
            ScenarioKind::BoundedRandomWalk { step_bound } => Some(*step_bound),
            ScenarioKind::PiecewiseConstant { .. } => None,
        }
    }

    /// Per-stage uniform offsets for the sinusoidal kind (used by tests
    /// that pin the closed-form drift constants).
    pub fn sinusoidal_offset(&self, k: usize) -> Option<f64> {
        match &self.kind {
            ScenarioKind::Sinusoidal { amplitude, period } => {
                Some(amplitude * (2.0 * std::f64::consts::PI * k as f64 / *period as f64).sin())
            }
            _ => None,
        }
    }
}

/// Expands a scenario into the revealed stage sequence for a kernel.
/// Deterministic function of `(kernel, spec)` including the seed.
pub fn generate_scenario(kernel: &MdpKernel, spec: &ScenarioSpec) -> Result<StageSequence> {
    spec.validate()?;
    if let Some(v) = validate_stage(kernel, &spec.base_cost).first() {
        return Err(AdpError::Contract(format!("base cost invalid: {v}")));
    }
    let k_max = spec.horizon;
    let stages: Vec<StageCost> = match &spec.kind {
        ScenarioKind::Static => vec![spec.base_cost.clone(); k_max],
        ScenarioKind::Sinusoidal { .. } => (0..k_max)
            .map(|k| spec.base_cost.offset(spec.sinusoidal_offset(k).unwrap()))
            .collect(),
        ScenarioKind::BoundedRandomWalk { step_bound } => {
            let mut out = Vec::with_capacity(k_max);
            let mut current = spec.base_cost.clone();
            out.push(current.clone());
            for k in 0..k_max.saturating_sub(1) {
                let mut next = current.clone();
                for (x, per_action) in next.g.iter_mut().enumerate() {
                    for (pos, row) in per_action.iter_mut().enumerate() {
                        let u = kernel.feasible(x)[pos];
                        for (y, v) in row.iter_mut().enumerate() {
                            let h =
                                seeded::mix(spec.seed, &[k as u64, x as u64, u as u64, y as u64]);
                            *v += seeded::symmetric(h, *step_bound);
                        }
                    }
                }
                out.push(next.clone());
                current = next;
            }
            out
        }
        ScenarioKind::PiecewiseConstant { switches } => {
            for (i, sw) in switches.iter().enumerate() {
                if let Some(v) = validate_stage(kernel, &sw.cost).first() {
                    return Err(AdpError::Contract(format!("switch {i} cost invalid: {v}")));
                }
            }
            let mut out = Vec::with_capacity(k_max);
            let mut current = &spec.base_cost;
            let mut next_switch = switches.iter().peekable();
            for k in 0..k_max {
                while let Some(sw) = next_switch.peek() {
                    if sw.at <= k {
                        current = &sw.cost;
                        next_switch.next();
                    } else {
                        break;
                    }
                }
                out.push(current.clone());
            }
            out
        }
    };
    StageSequence::new(kernel.clone(), stages)
}
