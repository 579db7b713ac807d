//! Deterministic online optimal control: `H_k(x, u, J) = g_k(x, u) + α·J(f(x, u))`.
//!
//! This coincides with the MDP mapping under the degenerate kernel
//! `p_{x, f(x,u)}(u) = 1`; `to_mdp` builds that embedding so the two can
//! be cross-checked exactly.

use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};
use crate::model::{check_horizon, check_table, AbstractModel, AffineOperator};
use crate::models::mdp::{MdpKernel, StageCost, StageSequence};
use crate::space::{CostTable, Policy, StateSpace};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawControl")]
pub struct DeterministicControlModel {
    n_states: usize,
    discount: f64,
    feasible: Vec<Vec<usize>>,
    /// Successor state `f(x, u)`, indexed `[state][action position]`.
    dynamics: Vec<Vec<usize>>,
    /// Stage costs `g_k(x, u)`, indexed `[k][state][action position]`.
    stages: Vec<Vec<Vec<f64>>>,
    #[serde(skip)]
    space: StateSpace,
}

#[derive(Deserialize)]
struct RawControl {
    n_states: usize,
    discount: f64,
    feasible: Vec<Vec<usize>>,
    dynamics: Vec<Vec<usize>>,
    stages: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawControl> for DeterministicControlModel {
    type Error = AdpError;
    fn try_from(raw: RawControl) -> Result<Self> {
        DeterministicControlModel::new(
            raw.n_states,
            raw.discount,
            raw.feasible,
            raw.dynamics,
            raw.stages,
        )
    }
}

impl DeterministicControlModel {
    pub fn new(
        n_states: usize,
        discount: f64,
        feasible: Vec<Vec<usize>>,
        dynamics: Vec<Vec<usize>>,
        stages: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if n_states == 0 {
            return Err(AdpError::Contract(
                "control model needs at least one state".into(),
            ));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(AdpError::Contract(format!(
                "discount must lie strictly inside (0,1), got {discount}"
            )));
        }
        if feasible.len() != n_states || dynamics.len() != n_states {
            return Err(AdpError::Contract(
                "feasible/dynamics must cover every state".into(),
            ));
        }
        for x in 0..n_states {
            if feasible[x].is_empty() {
                return Err(AdpError::Contract(format!(
                    "state {x} has no feasible action"
                )));
            }
            if !feasible[x].windows(2).all(|w| w[0] < w[1]) {
                return Err(AdpError::Contract(format!(
                    "feasible actions at state {x} must be strictly ascending"
                )));
            }
            if dynamics[x].len() != feasible[x].len() {
                return Err(AdpError::Contract(format!(
                    "dynamics at state {x} must be total on feasible actions"
                )));
            }
            if let Some(&y) = dynamics[x].iter().find(|&&y| y >= n_states) {
                return Err(AdpError::Contract(format!(
                    "dynamics at state {x} point to out-of-range state {y}"
                )));
            }
        }
        if stages.is_empty() {
            return Err(AdpError::Contract(
                "control model must reveal at least one stage".into(),
            ));
        }
        for (k, stage) in stages.iter().enumerate() {
            if stage.len() != n_states {
                return Err(AdpError::Contract(format!(
                    "stage {k} does not cover every state"
                )));
            }
            for x in 0..n_states {
                if stage[x].len() != feasible[x].len() {
                    return Err(AdpError::Contract(format!(
                        "stage {k} at state {x} does not cover the feasible actions"
                    )));
                }
                if stage[x].iter().any(|v| !v.is_finite()) {
                    return Err(AdpError::Contract(format!(
                        "stage {k} has a non-finite cost at state {x}"
                    )));
                }
            }
        }
        let space = StateSpace::unweighted(n_states);
        Ok(DeterministicControlModel {
            n_states,
            discount,
            feasible,
            dynamics,
            stages,
            space,
        })
    }

    pub fn successor(&self, x: usize, u: usize) -> Option<usize> {
        let position = self.feasible[x].iter().position(|&a| a == u)?;
        Some(self.dynamics[x][position])
    }

    /// The degenerate-kernel MDP embedding: `p_{x, f(x,u)}(u) = 1` and
    /// `g_k(x, u, y) = g_k(x, u)` for every successor.
    pub fn to_mdp(&self) -> StageSequence {
        let n = self.n_states;
        let transition = (0..n)
            .map(|x| {
                self.dynamics[x]
                    .iter()
                    .map(|&y| {
                        let mut row = vec![0.0; n];
                        row[y] = 1.0;
                        row
                    })
                    .collect()
            })
            .collect();
        let kernel = MdpKernel::new(n, self.discount, self.feasible.clone(), transition)
            .expect("degenerate kernel is row-stochastic by construction");
        let stages = self
            .stages
            .iter()
            .map(|stage| StageCost {
                g: (0..n)
                    .map(|x| stage[x].iter().map(|&c| vec![c; n]).collect())
                    .collect(),
            })
            .collect();
        StageSequence::new(kernel, stages).expect("embedding preserves validity")
    }
}

impl AbstractModel for DeterministicControlModel {
    fn n_states(&self) -> usize {
        self.n_states
    }

    fn horizon(&self) -> usize {
        self.stages.len()
    }

    fn contraction_modulus(&self) -> f64 {
        self.discount
    }

    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn feasible_actions(&self, x: usize) -> &[usize] {
        &self.feasible[x]
    }

    fn mapping(&self, k: usize, x: usize, u: usize, j: &CostTable) -> f64 {
        let position = self.feasible[x]
            .iter()
            .position(|&a| a == u)
            .unwrap_or_else(|| panic!("action {u} infeasible at state {x}"));
        self.stages[k][x][position] + self.discount * j.value(self.dynamics[x][position])
    }

    fn policy_affine(&self, k: usize, policy: &Policy) -> Option<AffineOperator> {
        let n = self.n_states;
        let mut matrix = vec![vec![0.0; n]; n];
        let mut offset = vec![0.0; n];
        for x in 0..n {
            let position = self.feasible[x]
                .iter()
                .position(|&a| a == policy.action(x))?;
            matrix[x][self.dynamics[x][position]] = self.discount;
            offset[x] = self.stages[k][x][position];
        }
        Some(AffineOperator { matrix, offset })
    }

    fn stage_gap_bound(&self, k: usize) -> Option<f64> {
        if k + 1 >= self.horizon() {
            return None;
        }
        let mut bound = 0.0_f64;
        for x in 0..self.n_states {
            let w = self.space.weight(x);
            for pos in 0..self.feasible[x].len() {
                let diff = (self.stages[k][x][pos] - self.stages[k + 1][x][pos]).abs();
                bound = bound.max(diff / w);
            }
        }
        Some(bound)
    }

    fn cost_magnitude_bound(&self) -> Option<f64> {
        Some(
            self.stages
                .iter()
                .flat_map(|s| s.iter())
                .flat_map(|r| r.iter())
                .fold(0.0_f64, |acc, v| acc.max(v.abs())),
        )
    }
}

/// Checked evaluation of the deterministic control mapping.
pub fn control_mapping(
    model: &DeterministicControlModel,
    k: usize,
    x: usize,
    u: usize,
    j: &CostTable,
) -> Result<f64> {
    check_horizon(model, k)?;
    check_table(model, j)?;
    if x >= model.n_states {
        return Err(AdpError::Contract(format!("state {x} out of range")));
    }
    if model.feasible[x].iter().all(|&a| a != u) {
        return Err(AdpError::InfeasibleAction {
            state: x,
            action: u,
        });
    }
    Ok(model.mapping(k, x, u, j))
}
