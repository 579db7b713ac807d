//! Exact per-step ground truth and drift-constant measurement.
//!
//! For each revealed time index the oracle produces the policy cost
//! `J_{k,μ}` (fixed point of `T_{k,μ}`), the optimal cost `J_k*` with an
//! optimal policy, and the Q-factor `Q_k*(x,u) = H_k(x, u, J_k*)`.
//!
//! Two algorithmically independent routes compute the optimum: Howard
//! policy iteration (evaluate, improve greedily, stop when the policy
//! repeats) and brute-force policy enumeration (one linear solve per
//! policy, componentwise minimum). The test suite holds them to 1e-10 of
//! each other on small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{AdpError, Result};
use crate::linalg::solve_dense;
use crate::model::{
    apply_bellman_operator, apply_policy_operator, check_horizon, check_policy, operator_power,
    AbstractModel, OperatorMode,
};
use crate::space::{weighted_sup_norm, CostTable, Policy};

/// Residual target for every fixed-point solve.
pub const FIXED_POINT_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 200_000;

/// Enumeration is used instead of sampling whenever the policy count is
/// at most this.
pub const EXACT_POLICY_ENUMERATION_CAP: usize = 4096;

/// State-action values over the feasible pairs, stored by action position.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QTable {
    rows: Vec<Vec<f64>>,
}

impl QTable {
    pub fn zeros<M: AbstractModel + ?Sized>(model: &M) -> Self {
        let rows = (0..model.n_states())
            .map(|x| vec![0.0; model.feasible_actions(x).len()])
            .collect();
        QTable { rows }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        QTable { rows }
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, position: usize) -> f64 {
        self.rows[x][position]
    }

    pub fn set(&mut self, x: usize, position: usize, v: f64) {
        self.rows[x][position] = v;
    }

    /// Value at `(x, u)` for an action id `u` feasible under `model`.
    pub fn value_for_action<M: AbstractModel + ?Sized>(
        &self,
        model: &M,
        x: usize,
        u: usize,
    ) -> f64 {
        let position = model
            .feasible_actions(x)
            .iter()
            .position(|&a| a == u)
            .unwrap_or_else(|| panic!("action {u} infeasible at state {x}"));
        self.rows[x][position]
    }

    /// Componentwise difference.
    pub fn sub(&self, other: &QTable) -> QTable {
        QTable {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    /// `‖Q‖ = max_{x,u} |Q(x,u)| / ν(x)`.
    pub fn norm(&self, space: &crate::space::StateSpace) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |v| v.abs() / space.weight(x)))
            .fold(0.0_f64, f64::max)
    }

    /// Per-state minimum and the (lowest-index) position attaining it.
    pub fn min_per_state(&self) -> (CostTable, Vec<usize>) {
        let mut values = Vec::with_capacity(self.rows.len());
        let mut arg = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut best = row[0];
            let mut best_pos = 0;
            for (pos, &v) in row.iter().enumerate().skip(1) {
                if v < best {
                    best = v;
                    best_pos = pos;
                }
            }
            values.push(best);
            arg.push(best_pos);
        }
        (
            CostTable::from_values(values).expect("finite by construction"),
            arg,
        )
    }
}

/// Solves the online policy evaluation `J_{k,μ} = T_{k,μ} J_{k,μ}`.
///
/// Models exposing an affine policy operator get a direct
/// `(I − A)J = b` solve; anything else falls back to fixed-point
/// iteration. Either way the residual `‖T_{k,μ}J − J‖` must come in
/// under [`FIXED_POINT_TOL`].
pub fn solve_policy_cost<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    policy: &Policy,
) -> Result<CostTable> {
    check_horizon(model, k)?;
    check_policy(model, policy)?;
    let solution = if let Some(affine) = model.policy_affine(k, policy) {
        let n = model.n_states();
        let mut system = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in 0..n {
                system[x][y] = -affine.matrix[x][y];
            }
            system[x][x] += 1.0;
        }
        CostTable::from_values(solve_dense(system, affine.offset)?)?
    } else {
        let mut j = CostTable::zeros(model.n_states());
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let next = apply_policy_operator(model, k, policy, &j)?;
            let gap = weighted_sup_norm(&next.sub(&j), model.space())?;
            j = next;
            if gap <= FIXED_POINT_TOL / 2.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(AdpError::Numerical(format!(
                "policy evaluation at k={k} did not converge within {MAX_SWEEPS} sweeps"
            )));
        }
        j
    };
    let residual = weighted_sup_norm(
        &apply_policy_operator(model, k, policy, &solution)?.sub(&solution),
        model.space(),
    )?;
    if residual > FIXED_POINT_TOL {
        return Err(AdpError::Numerical(format!(
            "policy cost residual {residual:.3e} exceeds {FIXED_POINT_TOL:.1e} at k={k}"
        )));
    }
    Ok(solution)
}

fn lowest_index_policy<M: AbstractModel + ?Sized>(model: &M) -> Policy {
    Policy::new(
        (0..model.n_states())
            .map(|x| model.feasible_actions(x)[0])
            .collect(),
    )
}

/// Howard policy iteration at time index `k`: evaluate exactly, improve
/// greedily keeping the incumbent action on ties, stop when the policy
/// repeats. Returns the fixed point of `T_k` and a policy attaining it.
pub fn solve_optimal<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
) -> Result<(CostTable, Policy)> {
    check_horizon(model, k)?;
    let mut policy = lowest_index_policy(model);
    let mut cost = solve_policy_cost(model, k, &policy)?;
    // Each improvement strictly lowers some state's cost, so this
    // terminates within the (finite) policy count.
    for _ in 0..=EXACT_POLICY_ENUMERATION_CAP {
        let mut improved = policy.actions().to_vec();
        let mut changed = false;
        for x in 0..model.n_states() {
            let incumbent = model.mapping(k, x, policy.action(x), &cost);
            let mut best = incumbent;
            let mut best_u = policy.action(x);
            for &u in model.feasible_actions(x) {
                let h = model.mapping(k, x, u, &cost);
                if h < best {
                    best = h;
                    best_u = u;
                }
            }
            if best_u != policy.action(x) {
                improved[x] = best_u;
                changed = true;
            }
        }
        if !changed {
            let residual = weighted_sup_norm(
                &apply_bellman_operator(model, k, &cost)?.0.sub(&cost),
                model.space(),
            )?;
            if residual > FIXED_POINT_TOL {
                return Err(AdpError::Numerical(format!(
                    "Bellman residual {residual:.3e} exceeds {FIXED_POINT_TOL:.1e} at k={k}"
                )));
            }
            return Ok((cost, policy));
        }
        policy = Policy::new(improved);
        cost = solve_policy_cost(model, k, &policy)?;
    }
    Err(AdpError::Numerical(format!(
        "policy iteration failed to terminate at k={k}"
    )))
}

/// Total number of deterministic policies, saturating at `usize::MAX`.
pub fn policy_count<M: AbstractModel + ?Sized>(model: &M) -> usize {
    let mut count: usize = 1;
    for x in 0..model.n_states() {
        count = count.saturating_mul(model.feasible_actions(x).len());
    }
    count
}

/// Every deterministic policy, in lexicographic order of action positions.
/// Callers should gate on [`policy_count`] first.
pub fn enumerate_policies<M: AbstractModel + ?Sized>(model: &M) -> Vec<Policy> {
    let n = model.n_states();
    let mut positions = vec![0usize; n];
    let mut out = Vec::with_capacity(policy_count(model));
    loop {
        out.push(Policy::new(
            (0..n)
                .map(|x| model.feasible_actions(x)[positions[x]])
                .collect(),
        ));
        let mut x = 0;
        loop {
            if x == n {
                return out;
            }
            positions[x] += 1;
            if positions[x] < model.feasible_actions(x).len() {
                break;
            }
            positions[x] = 0;
            x += 1;
        }
    }
}

/// Brute-force route to the optimum: a linear solve per policy and a
/// componentwise minimum. Independent of the Howard iteration path; the
/// returned policy is the greedy one at the enumerated minimum.
pub fn solve_optimal_by_enumeration<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
) -> Result<(CostTable, Policy)> {
    check_horizon(model, k)?;
    let count = policy_count(model);
    if count > EXACT_POLICY_ENUMERATION_CAP {
        return Err(AdpError::Contract(format!(
            "enumeration over {count} policies exceeds the cap of {EXACT_POLICY_ENUMERATION_CAP}"
        )));
    }
    let mut best: Option<CostTable> = None;
    for policy in enumerate_policies(model) {
        let cost = solve_policy_cost(model, k, &policy)?;
        best = Some(match best {
            None => cost,
            Some(current) => current.min_with(&cost),
        });
    }
    let j_star = best.expect("at least one policy exists");
    let (_, greedy) = apply_bellman_operator(model, k, &j_star)?;
    Ok((j_star, greedy))
}

/// Entrywise evaluation of `Q_k*(x, u) = H_k(x, u, J_k*)`.
pub fn compute_q_star<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    j_star: &CostTable,
) -> Result<QTable> {
    check_horizon(model, k)?;
    let rows = (0..model.n_states())
        .map(|x| {
            model
                .feasible_actions(x)
                .iter()
                .map(|&u| model.mapping(k, x, u, j_star))
                .collect()
        })
        .collect();
    Ok(QTable::from_rows(rows))
}

/// Cached per-step ground truth over the whole revealed horizon.
#[derive(Clone, Debug)]
pub struct Oracle {
    j_star: Vec<CostTable>,
    mu_star: Vec<Policy>,
    q_star: Vec<QTable>,
}

impl Oracle {
    /// Solves every revealed step once. Steps are independent, so the
    /// cache is safe to share across runs.
    pub fn compute<M: AbstractModel + ?Sized>(model: &M) -> Result<Oracle> {
        let mut j_star = Vec::with_capacity(model.horizon());
        let mut mu_star = Vec::with_capacity(model.horizon());
        let mut q_star = Vec::with_capacity(model.horizon());
        for k in 0..model.horizon() {
            let (j, mu) = solve_optimal(model, k)?;
            q_star.push(compute_q_star(model, k, &j)?);
            j_star.push(j);
            mu_star.push(mu);
        }
        Ok(Oracle {
            j_star,
            mu_star,
            q_star,
        })
    }

    pub fn horizon(&self) -> usize {
        self.j_star.len()
    }

    pub fn j_star(&self, k: usize) -> &CostTable {
        &self.j_star[k]
    }

    pub fn mu_star(&self, k: usize) -> &Policy {
        &self.mu_star[k]
    }

    pub fn q_star(&self, k: usize) -> &QTable {
        &self.q_star[k]
    }
}

/// One measured drift constant sequence with its horizon maximum.
///
/// `certified` marks values that are true upper bounds (closed form or
/// exhaustive enumeration); sampled values are lower estimates and are
/// flagged accordingly.
#[derive(Clone, Debug, Serialize)]
pub struct DriftSeries {
    pub per_step: Vec<f64>,
    pub max: f64,
    pub certified: bool,
}

impl DriftSeries {
    fn new(per_step: Vec<f64>, certified: bool) -> Self {
        let max = per_step.iter().fold(0.0_f64, |a, &b| a.max(b));
        DriftSeries {
            per_step,
            max,
            certified,
        }
    }
}

/// Measured bounds on how much consecutive stages differ, one entry per
/// consecutive pair `(k, k+1)`:
///
/// - `rho`: `‖J_k* − J_{k+1}*‖` (also `gamma2` and `eta3`),
/// - `gamma1`: `max_μ ‖J_{k,μ} − J_{k+1,μ}‖`,
/// - `eta1`: `sup_J ‖(T_k − T_{k+1})J‖`,
/// - `eta2`: `sup_{J,μ,j∈{1,k+1}} ‖(T_{k,μ}^j − T_{k+1,μ}^j)J‖`,
/// - `rho_bar`: `max{ρ_k, ‖Q_k* − Q_{k+1}*‖}`.
#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub alpha: f64,
    pub rho: DriftSeries,
    pub gamma1: DriftSeries,
    pub gamma2: DriftSeries,
    pub eta1: DriftSeries,
    pub eta2: DriftSeries,
    pub eta3: DriftSeries,
    pub rho_bar: DriftSeries,
}

fn sample_table(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CostTable {
    CostTable::from_values((0..n).map(|_| rng.gen_range(-radius..=radius)).collect())
        .expect("sampled values are finite")
}

fn sample_policy<M: AbstractModel + ?Sized>(rng: &mut ChaCha8Rng, model: &M) -> Policy {
    Policy::new(
        (0..model.n_states())
            .map(|x| {
                let feasible = model.feasible_actions(x);
                feasible[rng.gen_range(0..feasible.len())]
            })
            .collect(),
    )
}

/// Measures every drift constant of the revealed horizon.
///
/// Quantities with an exact route (optimal-cost gaps, policy enumeration
/// under the cap, stage-cost closed forms) are certified; the `sup` over
/// all of `B(X)` is otherwise approached by `sample_budget` seeded draws
/// from the invariant box `[−‖g‖/(1−α), ‖g‖/(1−α)]` and flagged as an
/// estimate.
pub fn measure_drift_constants<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    sample_budget: usize,
    seed: u64,
) -> Result<DriftReport> {
    let horizon = model.horizon();
    if horizon < 2 {
        return Err(AdpError::Contract(
            "drift measurement needs a horizon of at least 2".into(),
        ));
    }
    if sample_budget == 0 {
        return Err(AdpError::Contract("sample budget must be positive".into()));
    }
    let space = model.space();
    let alpha = model.contraction_modulus();
    let pairs = horizon - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = model
        .cost_magnitude_bound()
        .map(|g| (g / (1.0 - alpha)).max(1.0))
        .unwrap_or_else(|| {
            let j_max = (0..horizon)
                .map(|k| weighted_sup_norm(oracle.j_star(k), space).unwrap_or(0.0))
                .fold(0.0_f64, f64::max);
            2.0 * j_max + 1.0
        });

    let mut rho = Vec::with_capacity(pairs);
    let mut rho_bar = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let j_gap = weighted_sup_norm(&oracle.j_star(k).sub(oracle.j_star(k + 1)), space)?;
        let q_gap = oracle.q_star(k).sub(oracle.q_star(k + 1)).norm(space);
        rho.push(j_gap);
        rho_bar.push(j_gap.max(q_gap));
    }

    let count = policy_count(model);
    let enumerable = count <= EXACT_POLICY_ENUMERATION_CAP;
    let mut gamma1 = Vec::with_capacity(pairs);
    if enumerable {
        let policies = enumerate_policies(model);
        // One evaluation per (k, μ), reused for the (k, k+1) pair.
        let mut previous: Vec<CostTable> = policies
            .iter()
            .map(|mu| solve_policy_cost(model, 0, mu))
            .collect::<Result<_>>()?;
        for k in 0..pairs {
            let current: Vec<CostTable> = policies
                .iter()
                .map(|mu| solve_policy_cost(model, k + 1, mu))
                .collect::<Result<_>>()?;
            let mut worst = 0.0_f64;
            for (a, b) in previous.iter().zip(&current) {
                worst = worst.max(weighted_sup_norm(&a.sub(b), space)?);
            }
            gamma1.push(worst);
            previous = current;
        }
    } else {
        for k in 0..pairs {
            let mut worst = 0.0_f64;
            for _ in 0..sample_budget {
                let mu = sample_policy(&mut rng, model);
                let a = solve_policy_cost(model, k, &mu)?;
                let b = solve_policy_cost(model, k + 1, &mu)?;
                worst = worst.max(weighted_sup_norm(&a.sub(&b), space)?);
            }
            gamma1.push(worst);
        }
    }

    let certified_gap: Vec<Option<f64>> = (0..pairs).map(|k| model.stage_gap_bound(k)).collect();
    let all_certified = certified_gap.iter().all(Option::is_some);

    let mut eta1 = Vec::with_capacity(pairs);
    let mut eta2 = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let mut sampled_bellman = 0.0_f64;
        let mut sampled_policy = 0.0_f64;
        for _ in 0..sample_budget {
            let j = sample_table(&mut rng, model.n_states(), radius);
            let now = apply_bellman_operator(model, k, &j)?.0;
            let next = apply_bellman_operator(model, k + 1, &j)?.0;
            sampled_bellman = sampled_bellman.max(weighted_sup_norm(&now.sub(&next), space)?);

            let mu = sample_policy(&mut rng, model);
            for j_power in [1usize, k + 1] {
                let a = operator_power(model, k, OperatorMode::Policy(&mu), j_power, &j)?;
                let b = operator_power(model, k + 1, OperatorMode::Policy(&mu), j_power, &j)?;
                sampled_policy = sampled_policy.max(weighted_sup_norm(&a.sub(&b), space)?);
            }
        }
        match certified_gap[k] {
            Some(gap) => {
                // Telescoping: the j-fold power difference is at most
                // gap·(1 + α + … + α^{j−1}); the certifying gap already
                // dominates the sampled single-application estimates.
                let j_max = (k + 1) as i32;
                let powered = gap * (1.0 - alpha.powi(j_max)) / (1.0 - alpha);
                eta1.push(gap.max(sampled_bellman));
                eta2.push(gap.max(powered).max(sampled_policy));
            }
            None => {
                eta1.push(sampled_bellman);
                eta2.push(sampled_policy);
            }
        }
    }

    Ok(DriftReport {
        alpha,
        rho: DriftSeries::new(rho.clone(), true),
        gamma1: DriftSeries::new(gamma1, enumerable),
        gamma2: DriftSeries::new(rho.clone(), true),
        eta1: DriftSeries::new(eta1, all_certified),
        eta2: DriftSeries::new(eta2, all_certified),
        eta3: DriftSeries::new(rho.clone(), true),
        rho_bar: DriftSeries::new(rho_bar, true),
    })
}
