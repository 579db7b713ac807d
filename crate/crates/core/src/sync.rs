//! The five synchronous online algorithms.
//!
//! Every runner walks the revealed horizon once, records the iterate and
//! its tracking error against the per-step oracle at each `k`, and applies
//! the algorithm's update to move to `k + 1`. Controlled-error injectors
//! realize each approximation inequality with a known magnitude so the
//! theoretical bounds can be checked against what actually happened.

use crate::error::{AdpError, Result};
use crate::model::{
    apply_bellman_operator, apply_policy_operator, operator_power, AbstractModel, OperatorMode,
};
use crate::oracle::{solve_policy_cost, Oracle};
use crate::seeded;
use crate::space::{semilinear_gap, CostTable, Policy};
use crate::trajectory::{
    inject_error, realized_norm, AlgorithmId, ErrorInjector, PowerSchedule, Trajectory,
    TrajectoryStep,
};

fn check_run_inputs<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    powers: Option<&PowerSchedule>,
) -> Result<()> {
    if model.horizon() < 1 {
        return Err(AdpError::Contract("experiment horizon must be ≥ 1".into()));
    }
    if oracle.horizon() != model.horizon() {
        return Err(AdpError::Contract(format!(
            "oracle covers {} steps, model reveals {}",
            oracle.horizon(),
            model.horizon()
        )));
    }
    if let Some(p) = powers {
        if p.len() < model.horizon() {
            return Err(AdpError::Contract(format!(
                "power schedule covers {} steps, horizon is {}",
                p.len(),
                model.horizon()
            )));
        }
    }
    Ok(())
}

/// Approximate online VI: `J_{k+1} = T̃_k^{m_k} J_k`, where the tilde is
/// realized by injecting exactly `e_k` after the exact operator power.
///
/// Records `‖J_k − J_k*‖` per step.
pub fn run_approx_online_vi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    j0: &CostTable,
    powers: &PowerSchedule,
    injector: &ErrorInjector,
) -> Result<Trajectory> {
    check_run_inputs(model, oracle, Some(powers))?;
    let horizon = model.horizon();
    let space = model.space();
    let mut steps = Vec::with_capacity(horizon);
    let mut j = j0.clone();
    for k in 0..horizon {
        let error = realized_norm(&j, oracle.j_star(k), space);
        let mut step = TrajectoryStep::new(
            k,
            j.clone(),
            None,
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            powers.at(k),
        );
        if k + 1 < horizon {
            let powered = operator_power(model, k, OperatorMode::Bellman, powers.at(k), &j)?;
            let next = inject_error(&powered, injector.magnitude(k), injector.seed(), k, space);
            step.injected = injector.magnitude(k);
            step.realized_eval = realized_norm(&next, &powered, space);
            j = next;
        }
        steps.push(step);
    }
    Ok(Trajectory::new(AlgorithmId::Avi, injector.seed(), steps))
}

/// Online PI: exact policy evaluation `J_{k,μ_k} = T_{k,μ_k}J_{k,μ_k}`,
/// then exact greedy improvement `T_{k,μ_{k+1}}J_{k,μ_k} = T_k J_{k,μ_k}`.
///
/// Records `‖J_{k,μ_k} − J_k*‖` per step.
pub fn run_online_pi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    mu0: &Policy,
) -> Result<Trajectory> {
    check_run_inputs(model, oracle, None)?;
    let horizon = model.horizon();
    let space = model.space();
    let mut steps = Vec::with_capacity(horizon);
    let mut mu = mu0.clone();
    for k in 0..horizon {
        let j_mu = solve_policy_cost(model, k, &mu)?;
        let error = realized_norm(&j_mu, oracle.j_star(k), space);
        steps.push(TrajectoryStep::new(
            k,
            j_mu.clone(),
            Some(mu.clone()),
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            1,
        ));
        if k + 1 < horizon {
            let (_, greedy) = apply_bellman_operator(model, k, &j_mu)?;
            mu = greedy;
        }
    }
    Ok(Trajectory::new(AlgorithmId::Pi, 0, steps))
}

/// Picks an `ε_k`-suboptimal policy from the exact greedy one by swapping
/// the action at one seeded state to the second-best choice, but only
/// when the induced operator gap stays within the ceiling. Returns the
/// policy and the realized gap `‖T_{k,μ}J − T_kJ‖` (0 when no swap fits).
fn epsilon_greedy<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    j: &CostTable,
    greedy_cost: &CostTable,
    greedy: Policy,
    ceiling: f64,
    seed: u64,
) -> (Policy, f64) {
    if ceiling <= 0.0 {
        return (greedy, 0.0);
    }
    const SWAP_SALT: u64 = 0x5357_4150;
    let x0 = (seeded::mix(seed, &[k as u64, SWAP_SALT]) % model.n_states() as u64) as usize;
    let feasible = model.feasible_actions(x0);
    if feasible.len() < 2 {
        return (greedy, 0.0);
    }
    // Second-best action at x0 (lowest index on ties).
    let mut second: Option<(usize, f64)> = None;
    for &u in feasible {
        if u == greedy.action(x0) {
            continue;
        }
        let h = model.mapping(k, x0, u, j);
        if second.is_none_or(|(_, best)| h < best) {
            second = Some((u, h));
        }
    }
    let (swap_u, swap_h) = second.expect("at least two feasible actions");
    let gap = (swap_h - greedy_cost.value(x0)) / model.space().weight(x0);
    if gap <= ceiling {
        let mut actions = greedy.actions().to_vec();
        actions[x0] = swap_u;
        (Policy::new(actions), gap.max(0.0))
    } else {
        (greedy, 0.0)
    }
}

/// Approximate online PI: the evaluation is off by exactly `δ_{1,k}` and
/// the improvement is `ε_{1,k}`-greedy via a bounded second-best swap.
///
/// Records `‖J_{k,μ_k} − J_k*‖` (the true policy cost against the oracle);
/// the iterate stored per step is the perturbed cost the algorithm saw.
pub fn run_approx_online_pi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    mu0: &Policy,
    inj_eval: &ErrorInjector,
    inj_improve: &ErrorInjector,
) -> Result<Trajectory> {
    check_run_inputs(model, oracle, None)?;
    let horizon = model.horizon();
    let space = model.space();
    let mut steps = Vec::with_capacity(horizon);
    let mut mu = mu0.clone();
    for k in 0..horizon {
        let j_true = solve_policy_cost(model, k, &mu)?;
        let j_k = inject_error(&j_true, inj_eval.magnitude(k), inj_eval.seed(), k, space);
        let error = realized_norm(&j_true, oracle.j_star(k), space);
        let mut step = TrajectoryStep::new(
            k,
            j_k.clone(),
            Some(mu.clone()),
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            1,
        );
        step.injected = inj_eval.magnitude(k);
        step.realized_eval = realized_norm(&j_k, &j_true, space);
        if k + 1 < horizon {
            let (greedy_cost, greedy) = apply_bellman_operator(model, k, &j_k)?;
            let (next_mu, realized) = epsilon_greedy(
                model,
                k,
                &j_k,
                &greedy_cost,
                greedy,
                inj_improve.magnitude(k),
                inj_improve.seed(),
            );
            step.realized_improve = realized;
            mu = next_mu;
        }
        steps.push(step);
    }
    Ok(Trajectory::new(AlgorithmId::Api, inj_eval.seed(), steps))
}

/// Online optimistic PI: `μ_k` greedy at `J_k`, then
/// `J_{k+1} = T_{k,μ_k}^{m_k} J_k`.
///
/// Records `‖J_k − J_k*‖` per step and the constant
/// `c = max{0, M(T_0 J_0 − J_0)}`, the smallest `c ≥ 0` with
/// `J_0 ≥ T_0 J_0 − c·ν`.
pub fn run_online_optimistic_pi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    j0: &CostTable,
    powers: &PowerSchedule,
) -> Result<Trajectory> {
    check_run_inputs(model, oracle, Some(powers))?;
    let horizon = model.horizon();
    let space = model.space();
    let (t0, _) = apply_bellman_operator(model, 0, j0)?;
    let c = semilinear_gap(&t0.sub(j0), space)?.max(0.0);
    let mut steps = Vec::with_capacity(horizon);
    let mut j = j0.clone();
    for k in 0..horizon {
        let (_, greedy) = apply_bellman_operator(model, k, &j)?;
        let error = realized_norm(&j, oracle.j_star(k), space);
        steps.push(TrajectoryStep::new(
            k,
            j.clone(),
            Some(greedy.clone()),
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            powers.at(k),
        ));
        if k + 1 < horizon {
            j = operator_power(model, k, OperatorMode::Policy(&greedy), powers.at(k), &j)?;
        }
    }
    let mut traj = Trajectory::new(AlgorithmId::Opi, 0, steps);
    traj.c = Some(c);
    Ok(traj)
}

/// Approximate online optimistic PI.
///
/// Index convention: `μ_1` is `ε_0`-greedy at `J_0`; for `k ≥ 1`,
/// `J_k` comes from the time-(k−1) policy operator power
/// `T_{k−1,μ_k}^{m_k} J_{k−1}` perturbed by exactly `δ_k`, and `μ_{k+1}`
/// is `ε_k`-greedy at `J_k` under `T_k`.
///
/// Records `‖J_{k,μ_k} − J_k*‖` for `k ≥ 1` (step 0 carries
/// `‖J_0 − J_0*‖`), plus the anchors `M(T_{1,μ₁}J_0 − J_0)` and
/// `M(T_{1,μ₁}^{m₁}J_0 − J_1*)` the t5 bound machinery starts from.
pub fn run_approx_online_optimistic_pi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    j0: &CostTable,
    powers: &PowerSchedule,
    inj_improve: &ErrorInjector,
    inj_eval: &ErrorInjector,
) -> Result<Trajectory> {
    check_run_inputs(model, oracle, Some(powers))?;
    let horizon = model.horizon();
    if horizon < 2 {
        return Err(AdpError::Contract(
            "approximate optimistic PI needs a horizon of at least 2".into(),
        ));
    }
    let space = model.space();
    let mut steps = Vec::with_capacity(horizon);

    // Step 0 carries the initial condition; μ_1 is chosen at J_0 with T_0.
    let mut step0 = TrajectoryStep::new(
        0,
        j0.clone(),
        None,
        oracle.j_star(0).clone(),
        oracle.mu_star(0).clone(),
        realized_norm(j0, oracle.j_star(0), space),
        powers.at(0),
    );
    let (greedy_cost0, greedy0) = apply_bellman_operator(model, 0, j0)?;
    let (mut mu, realized0) = epsilon_greedy(
        model,
        0,
        j0,
        &greedy_cost0,
        greedy0,
        inj_improve.magnitude(0),
        inj_improve.seed(),
    );
    step0.realized_improve = realized0;
    steps.push(step0);

    // Anchors, exactly as the recursion starts them: r = T_{1,μ₁}J_0 − J_0
    // and t = T_{1,μ₁}^{m₁}J_0 − J_1*.
    let r1 = apply_policy_operator(model, 1, &mu, j0)?.sub(j0);
    let m_r1 = semilinear_gap(&r1, space)?;
    let t1 = operator_power(model, 1, OperatorMode::Policy(&mu), powers.at(1), j0)?
        .sub(oracle.j_star(1));
    let m_t1 = semilinear_gap(&t1, space)?;

    let mut j_prev = j0.clone();
    for k in 1..horizon {
        let powered = operator_power(
            model,
            k - 1,
            OperatorMode::Policy(&mu),
            powers.at(k),
            &j_prev,
        )?;
        let j_k = inject_error(&powered, inj_eval.magnitude(k), inj_eval.seed(), k, space);
        let j_mu = solve_policy_cost(model, k, &mu)?;
        let mut step = TrajectoryStep::new(
            k,
            j_k.clone(),
            Some(mu.clone()),
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            realized_norm(&j_mu, oracle.j_star(k), space),
            powers.at(k),
        );
        step.injected = inj_eval.magnitude(k);
        step.realized_eval = realized_norm(&j_k, &powered, space);
        if k + 1 < horizon {
            let (greedy_cost, greedy) = apply_bellman_operator(model, k, &j_k)?;
            let (next_mu, realized) = epsilon_greedy(
                model,
                k,
                &j_k,
                &greedy_cost,
                greedy,
                inj_improve.magnitude(k),
                inj_improve.seed(),
            );
            step.realized_improve = realized;
            mu = next_mu;
        }
        steps.push(step);
        j_prev = j_k;
    }
    let mut traj = Trajectory::new(AlgorithmId::Aopi, inj_eval.seed(), steps);
    traj.m_r1 = Some(m_r1);
    traj.m_t1 = Some(m_t1);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testbed;
    use crate::space::weighted_sup_norm;

    fn two_state_setup(horizon: usize) -> (crate::models::StageSequence, Oracle) {
        let model = testbed::two_state(horizon);
        let oracle = Oracle::compute(&model).unwrap();
        (model, oracle)
    }

    #[test]
    fn classical_vi_envelope_on_a_static_scenario() {
        let (model, oracle) = two_state_setup(30);
        let powers = PowerSchedule::constant(30, 1).unwrap();
        let inj = ErrorInjector::zero(30);
        let j0 = CostTable::zeros(2);
        let traj = run_approx_online_vi(&model, &oracle, &j0, &powers, &inj).unwrap();
        let gap0 = traj.steps[0].error;
        for (k, step) in traj.steps.iter().enumerate() {
            let envelope = 0.9_f64.powi(k as i32) * gap0;
            assert!(
                step.error <= envelope + 1e-12,
                "k={k}: error {} above α^k envelope {envelope}",
                step.error
            );
        }
    }

    #[test]
    fn horizon_one_records_only_the_initial_condition() {
        let (model, oracle) = two_state_setup(1);
        let powers = PowerSchedule::constant(1, 2).unwrap();
        let inj = ErrorInjector::zero(1);
        let j0 = CostTable::from_values(vec![4.0, -1.0]).unwrap();
        let traj = run_approx_online_vi(&model, &oracle, &j0, &powers, &inj).unwrap();
        assert_eq!(traj.horizon(), 1);
        assert_eq!(traj.steps[0].iterate, j0);
        let expected = weighted_sup_norm(&j0.sub(oracle.j_star(0)), model.space()).unwrap();
        assert_eq!(traj.steps[0].error, expected);
    }

    #[test]
    fn online_pi_reaches_the_optimum_in_two_steps() {
        let (model, oracle) = two_state_setup(5);
        let traj = run_online_pi(&model, &oracle, &Policy::new(vec![1, 0])).unwrap();
        assert_eq!(traj.steps[1].policy.as_ref().unwrap().actions(), &[0, 1]);
        assert!(
            traj.steps[1].error < 1e-10,
            "error after one improvement: {}",
            traj.steps[1].error
        );
    }

    #[test]
    fn online_pi_error_is_monotone_on_static_scenarios() {
        let (model, oracle) = two_state_setup(8);
        let traj = run_online_pi(&model, &oracle, &Policy::new(vec![1, 0])).unwrap();
        let gap0 = traj.steps[0].error;
        for (k, step) in traj.steps.iter().enumerate() {
            assert!(step.error <= 0.9_f64.powi(k as i32) * gap0 + 1e-12);
            if k > 0 {
                assert!(step.error <= traj.steps[k - 1].error + 1e-12);
            }
        }
    }

    #[test]
    fn zero_injectors_collapse_approximate_pi_to_exact_pi() {
        let (model, oracle) = two_state_setup(12);
        let mu0 = Policy::new(vec![1, 0]);
        let exact = run_online_pi(&model, &oracle, &mu0).unwrap();
        let approx = run_approx_online_pi(
            &model,
            &oracle,
            &mu0,
            &ErrorInjector::zero(12),
            &ErrorInjector::zero(12),
        )
        .unwrap();
        for (a, b) in exact.steps.iter().zip(&approx.steps) {
            assert_eq!(a.error, b.error, "error differs at k={}", a.k);
            assert_eq!(a.iterate, b.iterate, "iterate differs at k={}", a.k);
            assert_eq!(a.policy, b.policy, "policy differs at k={}", a.k);
        }
    }

    #[test]
    fn approximate_pi_asymptote_under_persistent_evaluation_error() {
        // Static scenario: the t3 curve settles at (ε₁ + 2αδ₁)/(1−α)².
        let horizon = 80;
        let (model, oracle) = two_state_setup(horizon);
        let delta1 = 0.05;
        let inj_eval = ErrorInjector::constant(horizon, delta1, 33).unwrap();
        let traj = run_approx_online_pi(
            &model,
            &oracle,
            &Policy::new(vec![1, 0]),
            &inj_eval,
            &ErrorInjector::zero(horizon),
        )
        .unwrap();
        let limit = (0.0 + 2.0 * 0.9 * delta1) / (0.1 * 0.1);
        for step in traj.steps.iter().skip(50) {
            assert!(
                step.error <= limit + 1e-9,
                "k={}: error {} above asymptote {limit}",
                step.k,
                step.error
            );
        }
    }

    #[test]
    fn optimistic_pi_with_unit_powers_matches_classical_vi() {
        let (model, oracle) = two_state_setup(15);
        let powers = PowerSchedule::constant(15, 1).unwrap();
        let j0 = CostTable::zeros(2);
        let opi = run_online_optimistic_pi(&model, &oracle, &j0, &powers).unwrap();
        let vi =
            run_approx_online_vi(&model, &oracle, &j0, &powers, &ErrorInjector::zero(15)).unwrap();
        for (a, b) in opi.steps.iter().zip(&vi.steps) {
            assert_eq!(
                a.iterate, b.iterate,
                "T_{{k,μ_k}}J_k = T_kJ_k must make m=1 runs agree"
            );
        }
    }

    #[test]
    fn optimistic_pi_records_the_smallest_valid_c() {
        let (model, oracle) = two_state_setup(4);
        let powers = PowerSchedule::constant(4, 2).unwrap();
        // From J_0 = 0 with nonnegative costs, T_0 J_0 ≥ J_0, so c = M(T_0J_0 − J_0) > 0.
        let traj =
            run_online_optimistic_pi(&model, &oracle, &CostTable::zeros(2), &powers).unwrap();
        assert_eq!(
            traj.c,
            Some(1.0),
            "M(T_0·0 − 0) = max(1, 0) at the two-state instance"
        );
        // From J_0 = J* the operator moves nothing, so c = 0.
        let at_star = run_online_optimistic_pi(&model, &oracle, oracle.j_star(0), &powers).unwrap();
        assert!(at_star.c.unwrap() <= 1e-10);
    }

    #[test]
    fn optimistic_pi_policy_costs_dominate_the_optimum() {
        // J_{k,μ_k} ≥ J_k* componentwise for the greedy policies the run
        // produces, any k.
        let (model, oracle) = two_state_setup(10);
        let powers = PowerSchedule::cycle(10, &[1, 2, 3]).unwrap();
        let traj =
            run_online_optimistic_pi(&model, &oracle, &CostTable::zeros(2), &powers).unwrap();
        for step in &traj.steps {
            let mu = step.policy.as_ref().unwrap();
            let j_mu = crate::oracle::solve_policy_cost(&model, step.k, mu).unwrap();
            assert!(
                oracle.j_star(step.k).le_within(&j_mu, 1e-10),
                "J_{{k,μ_k}} fell below J_k* at k={}",
                step.k
            );
        }
    }

    #[test]
    fn aopi_with_zero_injectors_reproduces_optimistic_pi_iterates() {
        let horizon = 14;
        let (model, oracle) = two_state_setup(horizon);
        let j0 = CostTable::zeros(2);
        // OPI forms J_{k+1} with m[k]; AOPI forms J_k with m[k]. Shifting
        // the schedule by one aligns the two conventions.
        let opi_powers = PowerSchedule::cycle(horizon, &[1, 2, 3]).unwrap();
        let mut shifted = vec![1usize];
        shifted.extend((0..horizon - 1).map(|k| opi_powers.at(k)));
        let aopi_powers = PowerSchedule::from_list(shifted).unwrap();
        let opi = run_online_optimistic_pi(&model, &oracle, &j0, &opi_powers).unwrap();
        let aopi = run_approx_online_optimistic_pi(
            &model,
            &oracle,
            &j0,
            &aopi_powers,
            &ErrorInjector::zero(horizon),
            &ErrorInjector::zero(horizon),
        )
        .unwrap();
        for k in 1..horizon {
            assert_eq!(
                aopi.steps[k].iterate, opi.steps[k].iterate,
                "iterates diverge at k={k}"
            );
            assert_eq!(
                aopi.steps[k].policy,
                opi.steps[k - 1].policy,
                "μ_k of (27) should equal μ_{{k−1}} of (23) at k={k}"
            );
        }
    }

    #[test]
    fn aopi_with_long_powers_behaves_like_exact_pi() {
        let horizon = 10;
        let (model, oracle) = two_state_setup(horizon);
        let powers = PowerSchedule::constant(horizon, 60).unwrap();
        let aopi = run_approx_online_optimistic_pi(
            &model,
            &oracle,
            &CostTable::zeros(2),
            &powers,
            &ErrorInjector::zero(horizon),
            &ErrorInjector::zero(horizon),
        )
        .unwrap();
        let pi = run_online_pi(&model, &oracle, &Policy::new(vec![0, 0])).unwrap();
        // With 60 policy applications the evaluation is essentially exact,
        // so the tracked errors agree with exact PI closely.
        for k in 2..horizon {
            assert!(
                (aopi.steps[k].error - pi.steps[k].error).abs() < 1e-8,
                "k={k}: aopi {} vs pi {}",
                aopi.steps[k].error,
                pi.steps[k].error
            );
        }
    }
}
