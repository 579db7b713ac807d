//! The abstract monotone-contractive model interface and the time-indexed
//! operators built on it.
//!
//! A model supplies the per-stage mapping `H_k(x, u, J)`; the two derived
//! operators are
//!
//! - the policy operator `(T_{k,μ} J)(x) = H_k(x, μ(x), J)`, and
//! - the Bellman operator `(T_k J)(x) = min_{u ∈ U(x)} H_k(x, u, J)`.
//!
//! Implementations must be monotone in `J` and a sup-norm contraction with
//! modulus `α ∈ (0,1)`; both properties are property-tested on every
//! shipped model rather than assumed silently.

use crate::error::{AdpError, Result};
use crate::space::{CostTable, Policy, StateSpace};

/// Affine representation of a policy operator: `(T_{k,μ} J)(x) = Σ_y A[x][y]·J(y) + b(x)`.
///
/// Models for which the policy operator is affine in `J` (finite MDPs,
/// deterministic control) expose this so policy evaluation can be an exact
/// linear solve instead of a fixed-point iteration.
#[derive(Clone, Debug)]
pub struct AffineOperator {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

/// A time-varying abstract dynamic programming model over a finite state set.
///
/// The mappings are revealed only up to a finite horizon `K`; asking for a
/// time index at or beyond `K` is an error, not an extrapolation.
pub trait AbstractModel {
    fn n_states(&self) -> usize;

    /// Number of revealed stages `K`; valid time indices are `0..K`.
    fn horizon(&self) -> usize;

    /// The contraction modulus α shared by all revealed stages.
    fn contraction_modulus(&self) -> f64;

    fn space(&self) -> &StateSpace;

    /// The nonempty, ascending set of feasible action ids at `x`.
    fn feasible_actions(&self, x: usize) -> &[usize];

    /// `H_k(x, u, J)`. Callers guarantee `k < horizon`, `u` feasible at
    /// `x`, and `J` conforming; the checked entry points live on the
    /// operator functions below.
    fn mapping(&self, k: usize, x: usize, u: usize, j: &CostTable) -> f64;

    /// Affine form of `T_{k,μ}` when one exists.
    fn policy_affine(&self, _k: usize, _policy: &Policy) -> Option<AffineOperator> {
        None
    }

    /// A closed-form value of `sup_{J,μ} ‖(T_{k,μ} − T_{k+1,μ})J‖`, when
    /// the model can certify one (stage-cost models can; it is exact for
    /// uniform cost offsets). Drives certified drift constants.
    fn stage_gap_bound(&self, _k: usize) -> Option<f64> {
        None
    }

    /// An upper bound on `|g|` entries when the model has stage costs;
    /// used to size the sampling box for drift measurement.
    fn cost_magnitude_bound(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn check_horizon<M: AbstractModel + ?Sized>(model: &M, k: usize) -> Result<()> {
    if k >= model.horizon() {
        return Err(AdpError::OutOfHorizon {
            k,
            horizon: model.horizon(),
        });
    }
    Ok(())
}

pub(crate) fn check_table<M: AbstractModel + ?Sized>(model: &M, j: &CostTable) -> Result<()> {
    if j.len() != model.n_states() {
        return Err(AdpError::DimensionMismatch {
            expected: model.n_states(),
            actual: j.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_policy<M: AbstractModel + ?Sized>(model: &M, policy: &Policy) -> Result<()> {
    if policy.len() != model.n_states() {
        return Err(AdpError::DimensionMismatch {
            expected: model.n_states(),
            actual: policy.len(),
        });
    }
    for x in 0..model.n_states() {
        let u = policy.action(x);
        if !model.feasible_actions(x).contains(&u) {
            return Err(AdpError::InfeasibleAction {
                state: x,
                action: u,
            });
        }
    }
    Ok(())
}

/// Applies the policy operator: `(T_{k,μ} J)(x) = H_k(x, μ(x), J)`.
pub fn apply_policy_operator<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    policy: &Policy,
    j: &CostTable,
) -> Result<CostTable> {
    check_horizon(model, k)?;
    check_table(model, j)?;
    check_policy(model, policy)?;
    let values = (0..model.n_states())
        .map(|x| model.mapping(k, x, policy.action(x), j))
        .collect();
    CostTable::from_values(values)
}

/// Applies the Bellman operator `(T_k J)(x) = min_{u ∈ U(x)} H_k(x, u, J)`
/// and returns a greedy policy attaining the minimum at each state.
///
/// Ties are broken toward the lowest action id, so the returned policy is
/// a deterministic function of the inputs.
pub fn apply_bellman_operator<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    j: &CostTable,
) -> Result<(CostTable, Policy)> {
    check_horizon(model, k)?;
    check_table(model, j)?;
    let n = model.n_states();
    let mut values = Vec::with_capacity(n);
    let mut actions = Vec::with_capacity(n);
    for x in 0..n {
        let feasible = model.feasible_actions(x);
        debug_assert!(
            !feasible.is_empty(),
            "feasible action set empty at state {x}"
        );
        let mut best_u = feasible[0];
        let mut best = model.mapping(k, x, best_u, j);
        for &u in &feasible[1..] {
            let h = model.mapping(k, x, u, j);
            if h < best {
                best = h;
                best_u = u;
            }
        }
        values.push(best);
        actions.push(best_u);
    }
    Ok((CostTable::from_values(values)?, Policy::new(actions)))
}

/// Which operator a power iterates.
#[derive(Clone, Copy, Debug)]
pub enum OperatorMode<'a> {
    Bellman,
    Policy(&'a Policy),
}

/// The m-fold composition of the chosen operator at a fixed time index.
///
/// `m = 0` is rejected: every algorithm here spends at least one
/// application per step.
pub fn operator_power<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    mode: OperatorMode<'_>,
    m: usize,
    j: &CostTable,
) -> Result<CostTable> {
    if m == 0 {
        return Err(AdpError::Contract("operator power requires m ≥ 1".into()));
    }
    let mut out = match mode {
        OperatorMode::Bellman => apply_bellman_operator(model, k, j)?.0,
        OperatorMode::Policy(policy) => apply_policy_operator(model, k, policy, j)?,
    };
    for _ in 1..m {
        out = match mode {
            OperatorMode::Bellman => apply_bellman_operator(model, k, &out)?.0,
            OperatorMode::Policy(policy) => apply_policy_operator(model, k, policy, &out)?,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testbed;
    use crate::space::weighted_sup_norm;

    #[test]
    fn policy_operator_on_single_loop() {
        // One state, one action, g = 1, α = 0.5: (T J)(0) = 1 + 0.5·J(0).
        let model = testbed::single_loop(4);
        let mu = Policy::new(vec![0]);
        let at_zero = apply_policy_operator(&model, 0, &mu, &CostTable::zeros(1)).unwrap();
        assert_eq!(at_zero.values(), &[1.0]);
        // J = 2 is the fixed point: 1/(1 − 0.5) = 2.
        let fixed = CostTable::from_values(vec![2.0]).unwrap();
        let at_fixed = apply_policy_operator(&model, 0, &mu, &fixed).unwrap();
        assert_eq!(at_fixed.values(), &[2.0]);
    }

    #[test]
    fn policy_operator_on_two_state() {
        let model = testbed::two_state(4);
        let mu = Policy::new(vec![0, 0]);
        let out = apply_policy_operator(&model, 0, &mu, &CostTable::zeros(2)).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0]);
    }

    #[test]
    fn bellman_operator_greedy_at_zero() {
        let model = testbed::two_state(4);
        let (cost, policy) = apply_bellman_operator(&model, 0, &CostTable::zeros(2)).unwrap();
        assert_eq!(cost.values(), &[1.0, 0.0]);
        assert_eq!(policy.actions(), &[0, 1]);
    }

    #[test]
    fn bellman_operator_fixes_optimal_cost() {
        let model = testbed::two_state(4);
        let j_star = CostTable::from_values(vec![10.0, 9.0]).unwrap();
        let (cost, policy) = apply_bellman_operator(&model, 0, &j_star).unwrap();
        assert_eq!(cost.values(), &[10.0, 9.0]);
        assert_eq!(policy.actions(), &[0, 1]);
    }

    #[test]
    fn single_action_bellman_equals_policy_operator() {
        let model = testbed::single_loop(3);
        let j = CostTable::from_values(vec![0.7]).unwrap();
        let (bellman, _) = apply_bellman_operator(&model, 1, &j).unwrap();
        let policy = apply_policy_operator(&model, 1, &Policy::new(vec![0]), &j).unwrap();
        assert_eq!(bellman, policy);
    }

    #[test]
    fn greedy_policy_reproduces_bellman_cost_exactly() {
        let model = testbed::two_state(4);
        for vals in [[0.0, 0.0], [5.0, -3.0], [12.4, 9.9]] {
            let j = CostTable::from_values(vals.to_vec()).unwrap();
            let (cost, policy) = apply_bellman_operator(&model, 0, &j).unwrap();
            let again = apply_policy_operator(&model, 0, &policy, &j).unwrap();
            assert_eq!(
                cost, again,
                "greedy policy must reproduce the Bellman cost bit-for-bit"
            );
        }
    }

    #[test]
    fn power_of_one_is_single_application() {
        let model = testbed::two_state(4);
        let j = CostTable::from_values(vec![1.0, -2.0]).unwrap();
        let single = apply_bellman_operator(&model, 0, &j).unwrap().0;
        let powered = operator_power(&model, 0, OperatorMode::Bellman, 1, &j).unwrap();
        assert_eq!(single, powered);
    }

    #[test]
    fn tenth_bellman_power_on_single_loop() {
        // Closed form: T^m 0 = 2(1 − 0.5^m); at m = 10 this is 1.998046875.
        let model = testbed::single_loop(2);
        let out =
            operator_power(&model, 0, OperatorMode::Bellman, 10, &CostTable::zeros(1)).unwrap();
        assert_eq!(out.values(), &[1.998046875]);
    }

    #[test]
    fn power_rejects_zero_iterations() {
        let model = testbed::single_loop(2);
        let err = operator_power(&model, 0, OperatorMode::Bellman, 0, &CostTable::zeros(1));
        assert!(matches!(err, Err(AdpError::Contract(_))));
    }

    #[test]
    fn power_contracts_at_rate_alpha_to_the_m() {
        let model = testbed::two_state(4);
        let space = model.space().clone();
        let alpha = model.contraction_modulus();
        let j1 = CostTable::from_values(vec![3.0, -1.0]).unwrap();
        let j2 = CostTable::from_values(vec![-2.0, 4.0]).unwrap();
        let gap = weighted_sup_norm(&j1.sub(&j2), &space).unwrap();
        for m in [1, 2, 5] {
            let t1 = operator_power(&model, 0, OperatorMode::Bellman, m, &j1).unwrap();
            let t2 = operator_power(&model, 0, OperatorMode::Bellman, m, &j2).unwrap();
            let after = weighted_sup_norm(&t1.sub(&t2), &space).unwrap();
            assert!(
                after <= alpha.powi(m as i32) * gap + 1e-12,
                "m = {m}: ‖T^m J1 − T^m J2‖ = {after} > α^m·‖J1 − J2‖ = {}",
                alpha.powi(m as i32) * gap
            );
        }
    }

    #[test]
    fn out_of_horizon_is_an_error() {
        let model = testbed::single_loop(2);
        let j = CostTable::zeros(1);
        assert!(matches!(
            apply_bellman_operator(&model, 2, &j),
            Err(AdpError::OutOfHorizon { k: 2, horizon: 2 })
        ));
        assert!(matches!(
            apply_policy_operator(&model, 5, &Policy::new(vec![0]), &j),
            Err(AdpError::OutOfHorizon { k: 5, horizon: 2 })
        ));
    }

    #[test]
    fn infeasible_policy_is_rejected() {
        let model = testbed::two_state(4);
        let bad = Policy::new(vec![0, 7]);
        assert!(matches!(
            apply_policy_operator(&model, 0, &bad, &CostTable::zeros(2)),
            Err(AdpError::InfeasibleAction {
                state: 1,
                action: 7
            })
        ));
    }
}
