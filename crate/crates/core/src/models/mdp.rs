//! Online finite-state discounted MDPs.
//!
//! The stage mapping is the exact probability-weighted sum
//! `H_k(x, u, J) = Σ_y p_{xy}(u)·(g_k(x, u, y) + α·J(y))` — no sampling
//! anywhere. The transition kernel is time-invariant; only the stage
//! costs `g_k` vary with `k`, which keeps every drift constant
//! attributable to the cost sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};
use crate::model::{check_horizon, check_table, AbstractModel, AffineOperator};
use crate::space::{CostTable, Policy, StateSpace};

/// Transition probabilities `p_{xy}(u)`, feasible action sets, and the
/// discount factor. Rows are indexed `[state][action position][successor]`
/// where "action position" is the index into the state's ascending
/// feasible list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawKernel")]
pub struct MdpKernel {
    n_states: usize,
    discount: f64,
    feasible: Vec<Vec<usize>>,
    transition: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawKernel {
    n_states: usize,
    discount: f64,
    feasible: Vec<Vec<usize>>,
    transition: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawKernel> for MdpKernel {
    type Error = AdpError;
    fn try_from(raw: RawKernel) -> Result<Self> {
        MdpKernel::new(raw.n_states, raw.discount, raw.feasible, raw.transition)
    }
}

impl MdpKernel {
    /// Builds a validated kernel: discount strictly inside (0,1), feasible
    /// sets nonempty and ascending, every probability row nonnegative and
    /// summing to 1 within 1e-12.
    pub fn new(
        n_states: usize,
        discount: f64,
        feasible: Vec<Vec<usize>>,
        transition: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let kernel = Self::new_unchecked(n_states, discount, feasible, transition)?;
        let violations = kernel.validate_rows();
        if let Some(v) = violations.first() {
            return Err(AdpError::Contract(format!("invalid kernel: {v}")));
        }
        Ok(kernel)
    }

    /// Shape-checks only. Used by the validator paths that must be able to
    /// report stochasticity defects as data instead of refusing them.
    pub fn new_unchecked(
        n_states: usize,
        discount: f64,
        feasible: Vec<Vec<usize>>,
        transition: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if n_states == 0 {
            return Err(AdpError::Contract("kernel needs at least one state".into()));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(AdpError::Contract(format!(
                "discount must lie strictly inside (0,1), got {discount}"
            )));
        }
        if feasible.len() != n_states || transition.len() != n_states {
            return Err(AdpError::Contract(
                "feasible and transition tables must cover every state".into(),
            ));
        }
        for (x, actions) in feasible.iter().enumerate() {
            if actions.is_empty() {
                return Err(AdpError::Contract(format!(
                    "state {x} has no feasible action"
                )));
            }
            if !actions.windows(2).all(|w| w[0] < w[1]) {
                return Err(AdpError::Contract(format!(
                    "feasible actions at state {x} must be strictly ascending"
                )));
            }
            if transition[x].len() != actions.len() {
                return Err(AdpError::Contract(format!(
                    "state {x} has {} probability rows for {} feasible actions",
                    transition[x].len(),
                    actions.len()
                )));
            }
            for (pos, row) in transition[x].iter().enumerate() {
                if row.len() != n_states {
                    return Err(AdpError::Contract(format!(
                        "probability row for state {x}, action {} has length {}",
                        actions[pos],
                        row.len()
                    )));
                }
            }
        }
        Ok(MdpKernel {
            n_states,
            discount,
            feasible,
            transition,
        })
    }

    fn validate_rows(&self) -> Vec<StageViolation> {
        let mut out = Vec::new();
        for x in 0..self.n_states {
            for (pos, &u) in self.feasible[x].iter().enumerate() {
                let row = &self.transition[x][pos];
                let mut sum = 0.0;
                for (y, &p) in row.iter().enumerate() {
                    if !(p.is_finite() && p >= 0.0) {
                        out.push(StageViolation::NegativeProbability {
                            state: x,
                            action: u,
                            successor: y,
                            value: p,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > 1e-12 {
                    out.push(StageViolation::RowSum {
                        state: x,
                        action: u,
                        sum,
                    });
                }
            }
        }
        out
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn feasible(&self, x: usize) -> &[usize] {
        &self.feasible[x]
    }

    /// Position of action id `u` in the feasible list at `x`.
    pub fn action_position(&self, x: usize, u: usize) -> Option<usize> {
        self.feasible[x].iter().position(|&a| a == u)
    }

    pub fn row(&self, x: usize, position: usize) -> &[f64] {
        &self.transition[x][position]
    }

    /// A dense random kernel: every action feasible everywhere, rows drawn
    /// uniformly and normalized. Deterministic in the seed.
    pub fn random(n_states: usize, n_actions: usize, discount: f64, seed: u64) -> Self {
        assert!(n_states >= 1 && n_actions >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let feasible: Vec<Vec<usize>> = (0..n_states).map(|_| (0..n_actions).collect()).collect();
        let transition = (0..n_states)
            .map(|_| {
                (0..n_actions)
                    .map(|_| {
                        let mut row: Vec<f64> =
                            (0..n_states).map(|_| rng.gen_range(0.05..1.0)).collect();
                        let total: f64 = row.iter().sum();
                        for p in row.iter_mut() {
                            *p /= total;
                        }
                        // Pin the sum to 1 exactly up to one rounding step.
                        let partial: f64 = row[..n_states - 1].iter().sum();
                        row[n_states - 1] = 1.0 - partial;
                        row
                    })
                    .collect()
            })
            .collect();
        MdpKernel::new(n_states, discount, feasible, transition)
            .expect("randomly generated kernel is valid by construction")
    }
}

/// Per-stage costs `g(x, u, y)`, defined for exactly the feasible pairs
/// and all successors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCost {
    /// Indexed `[state][action position][successor]`.
    pub g: Vec<Vec<Vec<f64>>>,
}

impl StageCost {
    /// A constant cost `c` on every entry of the kernel's shape.
    pub fn uniform(kernel: &MdpKernel, c: f64) -> Self {
        let g = (0..kernel.n_states())
            .map(|x| vec![vec![c; kernel.n_states()]; kernel.feasible(x).len()])
            .collect();
        StageCost { g }
    }

    /// Seeded uniform costs in `[0, 1)` on the kernel's shape.
    pub fn random(kernel: &MdpKernel, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = (0..kernel.n_states())
            .map(|x| {
                (0..kernel.feasible(x).len())
                    .map(|_| {
                        (0..kernel.n_states())
                            .map(|_| rng.gen_range(0.0..1.0))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        StageCost { g }
    }

    /// The same costs shifted by a uniform additive offset.
    pub fn offset(&self, delta: f64) -> Self {
        StageCost {
            g: self
                .g
                .iter()
                .map(|per_action| {
                    per_action
                        .iter()
                        .map(|row| row.iter().map(|v| v + delta).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Largest entrywise |g| over the table.
    pub fn magnitude(&self) -> f64 {
        self.g
            .iter()
            .flat_map(|a| a.iter())
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest entrywise |self − other|.
    pub fn max_abs_diff(&self, other: &StageCost) -> f64 {
        let mut out = 0.0_f64;
        for (a, b) in self.g.iter().zip(&other.g) {
            for (ra, rb) in a.iter().zip(b) {
                for (va, vb) in ra.iter().zip(rb) {
                    out = out.max((va - vb).abs());
                }
            }
        }
        out
    }
}

/// A defect found while validating a stage cost against a kernel.
///
/// Violations are data, not exceptions: the validator reports all of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StageViolation {
    RowSum {
        state: usize,
        action: usize,
        sum: f64,
    },
    NegativeProbability {
        state: usize,
        action: usize,
        successor: usize,
        value: f64,
    },
    MissingCoverage {
        state: usize,
        detail: String,
    },
    NonFiniteCost {
        state: usize,
        action: usize,
        successor: usize,
        value: f64,
    },
}

impl std::fmt::Display for StageViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StageViolation::RowSum { state, action, sum } => {
                write!(
                    f,
                    "probability row at (state {state}, action {action}) sums to {sum}"
                )
            }
            StageViolation::NegativeProbability {
                state,
                action,
                successor,
                value,
            } => write!(
                f,
                "probability at (state {state}, action {action}, successor {successor}) is {value}"
            ),
            StageViolation::MissingCoverage { state, detail } => {
                write!(f, "cost table coverage defect at state {state}: {detail}")
            }
            StageViolation::NonFiniteCost {
                state,
                action,
                successor,
                value,
            } => write!(
                f,
                "cost at (state {state}, action {action}, successor {successor}) is {value}"
            ),
        }
    }
}

/// Checks row-stochasticity of the kernel and coverage/finiteness of a
/// stage cost table against it. An empty report means valid.
pub fn validate_stage(kernel: &MdpKernel, stage: &StageCost) -> Vec<StageViolation> {
    let mut out = kernel.validate_rows();
    if stage.g.len() != kernel.n_states() {
        out.push(StageViolation::MissingCoverage {
            state: stage.g.len().min(kernel.n_states()),
            detail: format!(
                "cost table covers {} states, kernel has {}",
                stage.g.len(),
                kernel.n_states()
            ),
        });
        return out;
    }
    for x in 0..kernel.n_states() {
        let feasible = kernel.feasible(x);
        if stage.g[x].len() != feasible.len() {
            out.push(StageViolation::MissingCoverage {
                state: x,
                detail: format!(
                    "{} cost rows for {} feasible actions",
                    stage.g[x].len(),
                    feasible.len()
                ),
            });
            continue;
        }
        for (pos, &u) in feasible.iter().enumerate() {
            if stage.g[x][pos].len() != kernel.n_states() {
                out.push(StageViolation::MissingCoverage {
                    state: x,
                    detail: format!(
                        "cost row for action {u} has {} successors, kernel has {}",
                        stage.g[x][pos].len(),
                        kernel.n_states()
                    ),
                });
                continue;
            }
            for (y, &v) in stage.g[x][pos].iter().enumerate() {
                if !v.is_finite() {
                    out.push(StageViolation::NonFiniteCost {
                        state: x,
                        action: u,
                        successor: y,
                        value: v,
                    });
                }
            }
        }
    }
    out
}

/// The revealed prefix of an online MDP: a time-invariant kernel plus the
/// stage costs `g_0, …, g_{K−1}`.
#[derive(Clone, Debug)]
pub struct StageSequence {
    kernel: MdpKernel,
    stages: Vec<StageCost>,
    space: StateSpace,
}

impl StageSequence {
    /// Validates every stage against the kernel. Uses ν ≡ 1.
    pub fn new(kernel: MdpKernel, stages: Vec<StageCost>) -> Result<Self> {
        let space = StateSpace::unweighted(kernel.n_states());
        Self::with_space(kernel, stages, space)
    }

    pub fn with_space(
        kernel: MdpKernel,
        stages: Vec<StageCost>,
        space: StateSpace,
    ) -> Result<Self> {
        if stages.is_empty() {
            return Err(AdpError::Contract(
                "stage sequence must reveal at least one stage".into(),
            ));
        }
        if space.n_states() != kernel.n_states() {
            return Err(AdpError::DimensionMismatch {
                expected: kernel.n_states(),
                actual: space.n_states(),
            });
        }
        for (k, stage) in stages.iter().enumerate() {
            let violations = validate_stage(&kernel, stage);
            if let Some(v) = violations.first() {
                return Err(AdpError::Contract(format!("stage {k} invalid: {v}")));
            }
        }
        Ok(StageSequence {
            kernel,
            stages,
            space,
        })
    }

    pub fn kernel(&self) -> &MdpKernel {
        &self.kernel
    }

    pub fn stage(&self, k: usize) -> &StageCost {
        &self.stages[k]
    }

    pub fn stages(&self) -> &[StageCost] {
        &self.stages
    }

    fn mapping_unchecked(&self, k: usize, x: usize, position: usize, j: &CostTable) -> f64 {
        let row = self.kernel.row(x, position);
        let costs = &self.stages[k].g[x][position];
        let alpha = self.kernel.discount();
        let mut acc = 0.0;
        for y in 0..row.len() {
            acc += row[y] * (costs[y] + alpha * j.value(y));
        }
        acc
    }
}

impl AbstractModel for StageSequence {
    fn n_states(&self) -> usize {
        self.kernel.n_states()
    }

    fn horizon(&self) -> usize {
        self.stages.len()
    }

    fn contraction_modulus(&self) -> f64 {
        self.kernel.discount()
    }

    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn feasible_actions(&self, x: usize) -> &[usize] {
        self.kernel.feasible(x)
    }

    fn mapping(&self, k: usize, x: usize, u: usize, j: &CostTable) -> f64 {
        let position = self
            .kernel
            .action_position(x, u)
            .unwrap_or_else(|| panic!("action {u} infeasible at state {x}"));
        self.mapping_unchecked(k, x, position, j)
    }

    fn policy_affine(&self, k: usize, policy: &Policy) -> Option<AffineOperator> {
        let n = self.n_states();
        let alpha = self.kernel.discount();
        let mut matrix = vec![vec![0.0; n]; n];
        let mut offset = vec![0.0; n];
        for x in 0..n {
            let position = self.kernel.action_position(x, policy.action(x))?;
            let row = self.kernel.row(x, position);
            let costs = &self.stages[k].g[x][position];
            for y in 0..n {
                matrix[x][y] = alpha * row[y];
                offset[x] += row[y] * costs[y];
            }
        }
        Some(AffineOperator { matrix, offset })
    }

    fn stage_gap_bound(&self, k: usize) -> Option<f64> {
        if k + 1 >= self.horizon() {
            return None;
        }
        // (T_{k,μ}J − T_{k+1,μ}J)(x) = Σ_y p·(g_k − g_{k+1}) is independent
        // of J, so the sup over J and μ is attained at the per-state,
        // per-action maximum of the weighted cost difference.
        let mut bound = 0.0_f64;
        for x in 0..self.n_states() {
            let w = self.space.weight(x);
            for pos in 0..self.kernel.feasible(x).len() {
                let row = self.kernel.row(x, pos);
                let now = &self.stages[k].g[x][pos];
                let next = &self.stages[k + 1].g[x][pos];
                let diff: f64 = row
                    .iter()
                    .zip(now.iter().zip(next))
                    .map(|(p, (a, b))| p * (a - b))
                    .sum();
                bound = bound.max(diff.abs() / w);
            }
        }
        Some(bound)
    }

    fn cost_magnitude_bound(&self) -> Option<f64> {
        Some(
            self.stages
                .iter()
                .map(StageCost::magnitude)
                .fold(0.0, f64::max),
        )
    }
}

/// Checked evaluation of the MDP stage mapping of a [`StageSequence`].
pub fn mdp_mapping(
    seq: &StageSequence,
    k: usize,
    x: usize,
    u: usize,
    j: &CostTable,
) -> Result<f64> {
    check_horizon(seq, k)?;
    check_table(seq, j)?;
    if x >= seq.n_states() {
        return Err(AdpError::Contract(format!("state {x} out of range")));
    }
    let position = seq
        .kernel
        .action_position(x, u)
        .ok_or(AdpError::InfeasibleAction {
            state: x,
            action: u,
        })?;
    Ok(seq.mapping_unchecked(k, x, position, j))
}
