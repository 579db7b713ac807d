//! Small reference instances used across the test suites and demos.
//!
//! - `single_loop`: one state, one action, unit cost, α = 0.5; the optimal
//!   cost is the geometric series 1/(1 − 0.5) = 2.
//! - `two_state`: two states and two actions with α = 0.9; policy (0, 1)
//!   is optimal with J* = (10, 9), which a four-policy enumeration
//!   verifies by hand.

use crate::models::mdp::{MdpKernel, StageCost, StageSequence};

/// Kernel of the one-state self-loop instance (α = 0.5).
pub fn single_loop_kernel() -> MdpKernel {
    MdpKernel::new(1, 0.5, vec![vec![0]], vec![vec![vec![1.0]]]).unwrap()
}

/// The one-state instance with unit stage cost revealed for `horizon` steps.
pub fn single_loop(horizon: usize) -> StageSequence {
    let kernel = single_loop_kernel();
    let stage = StageCost::uniform(&kernel, 1.0);
    StageSequence::new(kernel, vec![stage; horizon]).unwrap()
}

/// Deterministic transitions of the two-state instance:
/// action 0 at state 0 self-loops (cost 1), action 1 moves 0 → 1 (cost 3),
/// action 0 at state 1 self-loops (cost 2), action 1 moves 1 → 0 (cost 0).
pub fn two_state_transition() -> Vec<Vec<Vec<f64>>> {
    vec![
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
    ]
}

pub fn two_state_kernel() -> MdpKernel {
    MdpKernel::new(2, 0.9, vec![vec![0, 1], vec![0, 1]], two_state_transition()).unwrap()
}

pub fn two_state_base_cost(kernel: &MdpKernel) -> StageCost {
    let mut cost = StageCost::uniform(kernel, 0.0);
    cost.g[0][0] = vec![1.0, 1.0];
    cost.g[0][1] = vec![3.0, 3.0];
    cost.g[1][0] = vec![2.0, 2.0];
    cost.g[1][1] = vec![0.0, 0.0];
    cost
}

/// The two-state instance with static costs revealed for `horizon` steps.
pub fn two_state(horizon: usize) -> StageSequence {
    let kernel = two_state_kernel();
    let stage = two_state_base_cost(&kernel);
    StageSequence::new(kernel, vec![stage; horizon]).unwrap()
}

/// A seeded dense random instance with static costs.
pub fn random_static(
    n_states: usize,
    n_actions: usize,
    discount: f64,
    seed: u64,
    horizon: usize,
) -> StageSequence {
    let kernel = MdpKernel::random(n_states, n_actions, discount, seed);
    let stage = StageCost::random(&kernel, seed.wrapping_add(0x5EED));
    StageSequence::new(kernel, vec![stage; horizon]).unwrap()
}
