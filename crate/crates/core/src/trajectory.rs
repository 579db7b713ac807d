//! Run records shared by every algorithm: power schedules, controlled
//! error injectors, and the per-step trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};
use crate::seeded;
use crate::space::{weighted_sup_norm, CostTable, Policy, StateSpace};

/// Which algorithm produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    /// Approximate online value iteration.
    Avi,
    /// Online policy iteration.
    Pi,
    /// Approximate online policy iteration.
    Api,
    /// Online optimistic policy iteration.
    Opi,
    /// Approximate online optimistic policy iteration.
    Aopi,
    AsyncVi,
    AsyncPi,
}

impl AlgorithmId {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::Avi => "avi",
            AlgorithmId::Pi => "pi",
            AlgorithmId::Api => "api",
            AlgorithmId::Opi => "opi",
            AlgorithmId::Aopi => "aopi",
            AlgorithmId::AsyncVi => "async-vi",
            AlgorithmId::AsyncPi => "async-pi",
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-step iteration counts `m_k ≥ 1` ("computational power").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSchedule {
    m: Vec<usize>,
}

impl PowerSchedule {
    pub fn from_list(m: Vec<usize>) -> Result<Self> {
        if m.is_empty() {
            return Err(AdpError::Contract("power schedule must be nonempty".into()));
        }
        if let Some(k) = m.iter().position(|&v| v == 0) {
            return Err(AdpError::Contract(format!("powers.m[{k}]: must be ≥ 1")));
        }
        Ok(PowerSchedule { m })
    }

    pub fn constant(len: usize, m: usize) -> Result<Self> {
        Self::from_list(vec![m; len])
    }

    /// Repeats `pattern` cyclically to cover `len` steps.
    pub fn cycle(len: usize, pattern: &[usize]) -> Result<Self> {
        if pattern.is_empty() {
            return Err(AdpError::Contract(
                "power cycle pattern must be nonempty".into(),
            ));
        }
        Self::from_list((0..len).map(|k| pattern[k % pattern.len()]).collect())
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn at(&self, k: usize) -> usize {
        self.m[k]
    }

    pub fn values(&self) -> &[usize] {
        &self.m
    }

    /// `m_d = min_k m_k` over the given index range.
    pub fn min_over(&self, range: std::ops::Range<usize>) -> usize {
        self.m[range].iter().copied().min().unwrap_or(1)
    }

    /// `m_s = max_k m_k` over the given index range.
    pub fn max_over(&self, range: std::ops::Range<usize>) -> usize {
        self.m[range].iter().copied().max().unwrap_or(1)
    }
}

/// How an injector realizes its configured magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectorMode {
    /// Perturb one seeded state so the realized norm equals the
    /// configured magnitude exactly.
    ExactMagnitude,
    /// No perturbation at all.
    Zero,
}

/// Deterministic controlled-error source, one magnitude per step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInjector {
    magnitudes: Vec<f64>,
    seed: u64,
    mode: InjectorMode,
}

impl ErrorInjector {
    pub fn zero(len: usize) -> Self {
        ErrorInjector {
            magnitudes: vec![0.0; len],
            seed: 0,
            mode: InjectorMode::Zero,
        }
    }

    pub fn constant(len: usize, magnitude: f64, seed: u64) -> Result<Self> {
        Self::from_list(vec![magnitude; len], seed)
    }

    pub fn from_list(magnitudes: Vec<f64>, seed: u64) -> Result<Self> {
        if let Some(k) = magnitudes
            .iter()
            .position(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(AdpError::Contract(format!(
                "injection magnitude at step {k} must be nonnegative, got {}",
                magnitudes[k]
            )));
        }
        Ok(ErrorInjector {
            magnitudes,
            seed,
            mode: InjectorMode::ExactMagnitude,
        })
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        match self.mode {
            InjectorMode::Zero => 0.0,
            InjectorMode::ExactMagnitude => self.magnitudes.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_magnitude(&self) -> f64 {
        match self.mode {
            InjectorMode::Zero => 0.0,
            InjectorMode::ExactMagnitude => self.magnitudes.iter().fold(0.0_f64, |a, &b| a.max(b)),
        }
    }
}

/// Returns `J′` differing from `J` at one seeded state by
/// `±magnitude·ν(x₀)` with a seeded sign; everything else is untouched,
/// and magnitude 0 returns `J` unchanged (bit-identical).
///
/// The realized `‖J′ − J‖` equals the configured magnitude up to one
/// rounding of the perturbed entry (bit-exact when that entry is zero);
/// runners record the realized value and the bound checks consume that.
pub fn inject_error(
    j: &CostTable,
    magnitude: f64,
    seed: u64,
    k: usize,
    space: &StateSpace,
) -> CostTable {
    assert!(magnitude >= 0.0, "injection magnitude must be nonnegative");
    if magnitude == 0.0 {
        return j.clone();
    }
    let h = seeded::mix(seed, &[k as u64]);
    let x0 = (h % j.len() as u64) as usize;
    let sign = if h & (1 << 63) == 0 { 1.0 } else { -1.0 };
    let mut out = j.clone();
    out.set(x0, j.value(x0) + sign * magnitude * space.weight(x0));
    out
}

/// One recorded step of a run.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryStep {
    pub k: usize,
    /// The algorithm's iterate at `k`: `J_k` for the VI/optimistic
    /// families, the approximate cost for approximate PI, `V_k` for the
    /// asynchronous pair iteration.
    pub iterate: CostTable,
    /// `μ_k` where the algorithm carries one.
    pub policy: Option<Policy>,
    pub oracle_cost: CostTable,
    pub oracle_policy: Policy,
    /// The per-algorithm tracking error at `k` (see each runner's doc).
    pub error: f64,
    /// `m_k` used by the step (1 where the algorithm has no power knob).
    pub m: usize,
    /// Configured injection magnitude consumed by this step's update.
    pub injected: f64,
    /// Realized evaluation-side error (`‖J_k − J_{k,μ_k}‖`, or the
    /// realized `e_k`/`δ_k` of the update leaving this step).
    pub realized_eval: f64,
    /// Realized improvement-side operator gap `‖T_{k,μ_{k+1}}J_k − T_kJ_k‖`.
    pub realized_improve: f64,
    /// Theoretical per-step bound, filled by the bounds layer.
    pub bound: Option<f64>,
    /// Tighter per-step-constant variant of the bound, where one exists.
    pub bound_stepwise: Option<f64>,
}

impl TrajectoryStep {
    pub(crate) fn new(
        k: usize,
        iterate: CostTable,
        policy: Option<Policy>,
        oracle_cost: CostTable,
        oracle_policy: Policy,
        error: f64,
        m: usize,
    ) -> Self {
        TrajectoryStep {
            k,
            iterate,
            policy,
            oracle_cost,
            oracle_policy,
            error,
            m,
            injected: 0.0,
            realized_eval: 0.0,
            realized_improve: 0.0,
            bound: None,
            bound_stepwise: None,
        }
    }
}

/// A full run record: per-step iterates, oracle values, realized errors,
/// and the header identifying the run.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub algorithm: AlgorithmId,
    /// Digest of the generating scenario; filled by the harness.
    pub scenario_digest: String,
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
    /// `c = max{0, M(T_0 J_0 − J_0)}` recorded by optimistic PI.
    pub c: Option<f64>,
    /// `M(T_{1,μ₁}J_0 − J_0)` recorded by approximate optimistic PI.
    pub m_r1: Option<f64>,
    /// `M(T_{1,μ₁}^{m₁}J_0 − J_1*)` recorded by approximate optimistic PI.
    pub m_t1: Option<f64>,
}

impl Trajectory {
    pub(crate) fn new(algorithm: AlgorithmId, seed: u64, steps: Vec<TrajectoryStep>) -> Self {
        Trajectory {
            algorithm,
            scenario_digest: String::new(),
            seed,
            steps,
            c: None,
            m_r1: None,
            m_t1: None,
        }
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.error).collect()
    }

    /// Largest realized improvement-side gap over the run.
    pub fn max_realized_improve(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.realized_improve)
            .fold(0.0, f64::max)
    }

    /// Largest realized evaluation-side error over the run.
    pub fn max_realized_eval(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.realized_eval)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn realized_norm(a: &CostTable, b: &CostTable, space: &StateSpace) -> f64 {
    weighted_sup_norm(&a.sub(b), space).expect("conforming tables")
}
