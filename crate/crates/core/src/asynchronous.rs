//! Asynchronous algorithms under simulated logical asynchrony.
//!
//! Asynchrony here is a deterministic global clock with per-processor
//! activation sets and bounded read delays, not threads: the tracking
//! bounds are stated over the same logical clock, and determinism makes
//! golden tests possible. Within one tick the active processors write disjoint state
//! blocks and read through an immutable history window, so executing them
//! in parallel would not change any result.
//!
//! The PI variant iterates the uniform-fixed-point pair mapping
//! `G_{k,μ}(V, Q) = (MF_{k,μ}(V,Q), F_{k,μ}(V,Q))` whose fixed point is
//! `(J_k*, Q_k*)` for every policy μ.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};
use crate::model::{check_policy, operator_power, AbstractModel, OperatorMode};
use crate::oracle::{Oracle, QTable};
use crate::seeded;
use crate::space::{weighted_sup_norm, CostTable, Policy, StateSpace};
use crate::trajectory::{
    inject_error, realized_norm, AlgorithmId, ErrorInjector, PowerSchedule, Trajectory,
    TrajectoryStep,
};

/// Assignment of every state to one of `N` processors; each processor
/// owns a nonempty block and the blocks are disjoint and exhaustive.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawPartition")]
pub struct Partition {
    assignment: Vec<usize>,
    n_processors: usize,
    #[serde(skip)]
    owned: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawPartition {
    assignment: Vec<usize>,
    n_processors: usize,
}

impl TryFrom<RawPartition> for Partition {
    type Error = AdpError;
    fn try_from(raw: RawPartition) -> Result<Self> {
        Partition::new(raw.assignment, raw.n_processors)
    }
}

impl Partition {
    pub fn new(assignment: Vec<usize>, n_processors: usize) -> Result<Self> {
        if n_processors == 0 || assignment.is_empty() {
            return Err(AdpError::Contract("partition must be nonempty".into()));
        }
        let mut owned = vec![Vec::new(); n_processors];
        for (x, &l) in assignment.iter().enumerate() {
            if l >= n_processors {
                return Err(AdpError::Contract(format!(
                    "state {x} assigned to processor {l}, only {n_processors} exist"
                )));
            }
            owned[l].push(x);
        }
        if let Some(l) = owned.iter().position(Vec::is_empty) {
            return Err(AdpError::Contract(format!("processor {l} owns no states")));
        }
        Ok(Partition {
            assignment,
            n_processors,
            owned,
        })
    }

    /// Contiguous blocks of near-equal size.
    pub fn blocks(n_states: usize, n_processors: usize) -> Result<Self> {
        if n_processors == 0 || n_processors > n_states {
            return Err(AdpError::Contract(format!(
                "cannot split {n_states} states across {n_processors} processors"
            )));
        }
        let assignment = (0..n_states)
            .map(|x| (x * n_processors / n_states).min(n_processors - 1))
            .collect();
        Partition::new(assignment, n_processors)
    }

    pub fn n_processors(&self) -> usize {
        self.n_processors
    }

    pub fn owner(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn owned_states(&self, l: usize) -> &[usize] {
        &self.owned[l]
    }

    pub fn n_states(&self) -> usize {
        self.assignment.len()
    }
}

/// How delayed read indices `τ_{li}(k)` are produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DelaySpec {
    /// Always read the current iterate.
    Zero,
    /// Seeded uniform draw from `[max(0, k−T_d), k]`, keyed by
    /// `(seed, l, i, k)` so the draw order never matters.
    Seeded { seed: u64 },
    /// Explicit table indexed `[l][i][k]`.
    Explicit { table: Vec<Vec<Vec<usize>>> },
}

/// Activation sets and read delays for a run: processor `l` applies its
/// update at ticks in `improve[l]` (and, for PI, evaluates at ticks in
/// `evaluate[l]`), reading iterates at most `t_d` ticks stale, with every
/// window of `t_a + 1` consecutive ticks containing an activation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsyncSchedule {
    pub improve: Vec<BTreeSet<usize>>,
    #[serde(default)]
    pub evaluate: Vec<BTreeSet<usize>>,
    pub delays: DelaySpec,
    pub t_a: usize,
    pub t_d: usize,
}

/// A schedule defect. Violations are data so a report can show all of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ScheduleViolation {
    /// `improve[l] ∩ [k, k+T_a]` is empty.
    ImproveWindow {
        processor: usize,
        window_start: usize,
    },
    /// `evaluate[l] ∩ [k, k+T_a]` is empty.
    EvaluateWindow {
        processor: usize,
        window_start: usize,
    },
    /// A read at tick `k` would reach `τ` with `k − τ > T_d` (or `τ > k`).
    Delay {
        processor: usize,
        source: usize,
        k: usize,
        tau: usize,
    },
    /// A processor improves and evaluates at the same tick.
    Overlap { processor: usize, k: usize },
    /// Shape defect (processor counts, missing tables).
    Shape { detail: String },
}

impl std::fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScheduleViolation::ImproveWindow {
                processor,
                window_start,
            } => write!(
                f,
                "processor {processor} has no activation in [{window_start}, {window_start}+T_a]"
            ),
            ScheduleViolation::EvaluateWindow {
                processor,
                window_start,
            } => write!(
                f,
                "processor {processor} has no evaluation in [{window_start}, {window_start}+T_a]"
            ),
            ScheduleViolation::Delay {
                processor,
                source,
                k,
                tau,
            } => write!(
                f,
                "read by processor {processor} from {source} at tick {k} reaches τ={tau}"
            ),
            ScheduleViolation::Overlap { processor, k } => {
                write!(
                    f,
                    "processor {processor} improves and evaluates at tick {k}"
                )
            }
            ScheduleViolation::Shape { detail } => write!(f, "shape defect: {detail}"),
        }
    }
}

impl AsyncSchedule {
    /// Round-robin VI schedule: processor `l` activates at ticks
    /// `≡ l (mod period)` with `period = min(n, t_a + 1)`.
    pub fn round_robin_vi(
        n_processors: usize,
        horizon: usize,
        t_a: usize,
        t_d: usize,
        delays: DelaySpec,
    ) -> Self {
        let period = n_processors.min(t_a + 1).max(1);
        let improve = (0..n_processors)
            .map(|l| (0..horizon).filter(|k| k % period == l % period).collect())
            .collect();
        AsyncSchedule {
            improve,
            evaluate: Vec::new(),
            delays,
            t_a,
            t_d,
        }
    }

    /// VI schedule with seeded activation gaps in `[1, t_a + 1]`, so the
    /// window bound is genuinely exercised rather than met trivially.
    pub fn seeded_vi(
        n_processors: usize,
        horizon: usize,
        t_a: usize,
        t_d: usize,
        seed: u64,
    ) -> Self {
        let improve = (0..n_processors)
            .map(|l| {
                let mut set = BTreeSet::new();
                let mut t = (seeded::mix(seed, &[l as u64, 0]) % (t_a as u64 + 1)) as usize;
                let mut i = 1u64;
                while t < horizon {
                    set.insert(t);
                    let gap = 1 + (seeded::mix(seed, &[l as u64, i]) % (t_a as u64 + 1)) as usize;
                    t += gap.min(t_a + 1);
                    i += 1;
                }
                set
            })
            .collect();
        AsyncSchedule {
            improve,
            evaluate: Vec::new(),
            delays: DelaySpec::Seeded { seed },
            t_a,
            t_d,
        }
    }

    /// Alternating PI schedule with period `2·n`: processor `l` improves
    /// at ticks `≡ 2l` and evaluates at ticks `≡ 2l + 1 (mod 2n)`.
    /// Requires `t_a ≥ 2n − 1` to satisfy the window bound.
    pub fn alternating_pi(n_processors: usize, horizon: usize, t_a: usize) -> Self {
        let period = 2 * n_processors;
        let improve = (0..n_processors)
            .map(|l| (0..horizon).filter(|k| k % period == 2 * l).collect())
            .collect();
        let evaluate = (0..n_processors)
            .map(|l| (0..horizon).filter(|k| k % period == 2 * l + 1).collect())
            .collect();
        AsyncSchedule {
            improve,
            evaluate,
            delays: DelaySpec::Zero,
            t_a,
            t_d: 0,
        }
    }

    /// Dense PI schedule: every processor improves at even ticks and
    /// evaluates at odd ticks (disjoint per processor; writes across
    /// processors stay disjoint by ownership).
    pub fn dense_alternating_pi(n_processors: usize, horizon: usize, t_a: usize) -> Self {
        let improve: Vec<BTreeSet<usize>> =
            vec![(0..horizon).filter(|k| k % 2 == 0).collect(); n_processors];
        let evaluate: Vec<BTreeSet<usize>> =
            vec![(0..horizon).filter(|k| k % 2 == 1).collect(); n_processors];
        AsyncSchedule {
            improve,
            evaluate,
            delays: DelaySpec::Zero,
            t_a,
            t_d: 0,
        }
    }

    pub fn improve_active(&self, l: usize, k: usize) -> bool {
        self.improve.get(l).is_some_and(|s| s.contains(&k))
    }

    pub fn evaluate_active(&self, l: usize, k: usize) -> bool {
        self.evaluate.get(l).is_some_and(|s| s.contains(&k))
    }

    /// The delayed read index `τ_{li}(k) ∈ [max(0, k−T_d), k]`.
    pub fn delay_source(&self, l: usize, i: usize, k: usize) -> usize {
        match &self.delays {
            DelaySpec::Zero => k,
            DelaySpec::Seeded { seed } => {
                let span = self.t_d.min(k) as u64 + 1;
                let back = seeded::mix(*seed, &[l as u64, i as u64, k as u64]) % span;
                k - back as usize
            }
            DelaySpec::Explicit { table } => table[l][i][k],
        }
    }

    fn window_gaps(set: &BTreeSet<usize>, horizon: usize, t_a: usize) -> Vec<usize> {
        // Window starts k with set ∩ [k, k+t_a] = ∅, for windows fully
        // inside the horizon (the finitely checkable statement).
        let mut out = Vec::new();
        if horizon < t_a + 1 {
            return out;
        }
        let mut sorted = set.iter().copied().peekable();
        for k in 0..=(horizon - t_a - 1) {
            while sorted.peek().is_some_and(|&t| t < k) {
                sorted.next();
            }
            match sorted.peek() {
                Some(&t) if t <= k + t_a => {}
                _ => out.push(k),
            }
        }
        out
    }

    /// Checks every window and delay invariant over the horizon. An empty
    /// report means the schedule is valid for the given use.
    pub fn validate(
        &self,
        n_processors: usize,
        horizon: usize,
        needs_evaluation_sets: bool,
    ) -> Vec<ScheduleViolation> {
        let mut out = Vec::new();
        if self.improve.len() != n_processors {
            out.push(ScheduleViolation::Shape {
                detail: format!(
                    "{} improve sets for {n_processors} processors",
                    self.improve.len()
                ),
            });
            return out;
        }
        if needs_evaluation_sets && self.evaluate.len() != n_processors {
            out.push(ScheduleViolation::Shape {
                detail: format!(
                    "{} evaluate sets for {n_processors} processors",
                    self.evaluate.len()
                ),
            });
            return out;
        }
        for l in 0..n_processors {
            for k in Self::window_gaps(&self.improve[l], horizon, self.t_a) {
                out.push(ScheduleViolation::ImproveWindow {
                    processor: l,
                    window_start: k,
                });
            }
            if needs_evaluation_sets {
                for k in Self::window_gaps(&self.evaluate[l], horizon, self.t_a) {
                    out.push(ScheduleViolation::EvaluateWindow {
                        processor: l,
                        window_start: k,
                    });
                }
                for &k in self.improve[l].intersection(&self.evaluate[l]) {
                    out.push(ScheduleViolation::Overlap { processor: l, k });
                }
            }
            for i in 0..n_processors {
                for k in 0..horizon {
                    let tau = self.delay_source(l, i, k);
                    if tau > k || k - tau > self.t_d {
                        out.push(ScheduleViolation::Delay {
                            processor: l,
                            source: i,
                            k,
                            tau,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Checked wrapper used by the runners and the CLI.
pub fn validate_schedule(
    sched: &AsyncSchedule,
    n_processors: usize,
    horizon: usize,
    needs_evaluation_sets: bool,
) -> Vec<ScheduleViolation> {
    sched.validate(n_processors, horizon, needs_evaluation_sets)
}

/// A cost-function / Q-factor pair, the iterate of asynchronous PI.
#[derive(Clone, Debug, PartialEq)]
pub struct VQPair {
    pub v: CostTable,
    pub q: QTable,
}

impl VQPair {
    pub fn sub(&self, other: &VQPair) -> VQPair {
        VQPair {
            v: self.v.sub(&other.v),
            q: self.q.sub(&other.q),
        }
    }
}

/// `‖(V, Q)‖ = max{‖V‖, ‖Q‖}` with `‖Q‖` the weighted sup over pairs.
pub fn vq_norm(pair: &VQPair, space: &StateSpace) -> Result<f64> {
    let v_norm = weighted_sup_norm(&pair.v, space)?;
    if pair.q.n_states() != space.n_states() {
        return Err(AdpError::DimensionMismatch {
            expected: space.n_states(),
            actual: pair.q.n_states(),
        });
    }
    Ok(v_norm.max(pair.q.norm(space)))
}

/// The effective continuation table `min{V, Q_μ}(y) = min{V(y), Q(y, μ(y))}`.
fn effective_continuation<M: AbstractModel + ?Sized>(
    model: &M,
    mu: &Policy,
    v: &CostTable,
    q: &QTable,
) -> CostTable {
    let values = (0..model.n_states())
        .map(|y| v.value(y).min(q.value_for_action(model, y, mu.action(y))))
        .collect();
    CostTable::from_values(values).expect("finite by construction")
}

/// `F_{k,μ}(V, Q)(x, u) = H_k(x, u, min{V, Q_μ})`.
pub fn f_mapping<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    mu: &Policy,
    v: &CostTable,
    q: &QTable,
) -> Result<QTable> {
    crate::model::check_horizon(model, k)?;
    crate::model::check_table(model, v)?;
    check_policy(model, mu)?;
    let w = effective_continuation(model, mu, v, q);
    let rows = (0..model.n_states())
        .map(|x| {
            model
                .feasible_actions(x)
                .iter()
                .map(|&u| model.mapping(k, x, u, &w))
                .collect()
        })
        .collect();
    Ok(QTable::from_rows(rows))
}

/// `MF_{k,μ}(V, Q)(x) = min_u F_{k,μ}(V, Q)(x, u)`, with the attaining
/// policy (lowest action id on ties).
pub fn mf_mapping<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    mu: &Policy,
    v: &CostTable,
    q: &QTable,
) -> Result<(CostTable, Policy)> {
    let f = f_mapping(model, k, mu, v, q)?;
    let (cost, positions) = f.min_per_state();
    let actions = positions
        .iter()
        .enumerate()
        .map(|(x, &pos)| model.feasible_actions(x)[pos])
        .collect();
    Ok((cost, Policy::new(actions)))
}

/// The pair mapping `G_{k,μ}(V, Q) = (MF_{k,μ}(V,Q), F_{k,μ}(V,Q))`.
pub fn g_mapping<M: AbstractModel + ?Sized>(
    model: &M,
    k: usize,
    mu: &Policy,
    pair: &VQPair,
) -> Result<VQPair> {
    let q = f_mapping(model, k, mu, &pair.v, &pair.q)?;
    let (v, _) = mf_mapping(model, k, mu, &pair.v, &pair.q)?;
    Ok(VQPair { v, q })
}

/// Asynchronous approximate online VI over a partitioned state space.
///
/// Per tick, each activated processor assembles its delayed view of the
/// global iterate, applies `T̃_k^{m_k}` (operator power plus injection of
/// `e_k`), and overwrites only its own states; everything else carries
/// over bitwise. Requires ν ≡ 1.
///
/// Records `‖J_k − J_k*‖` per tick.
pub fn run_async_online_vi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    j0: &CostTable,
    partition: &Partition,
    sched: &AsyncSchedule,
    powers: &PowerSchedule,
    injector: &ErrorInjector,
) -> Result<Trajectory> {
    let horizon = model.horizon();
    let space = model.space();
    if !space.is_unweighted() {
        return Err(AdpError::Contract(
            "asynchronous VI error tracking is stated for ν ≡ 1".into(),
        ));
    }
    if partition.n_states() != model.n_states() {
        return Err(AdpError::DimensionMismatch {
            expected: model.n_states(),
            actual: partition.n_states(),
        });
    }
    let violations = sched.validate(partition.n_processors(), horizon, false);
    if let Some(v) = violations.first() {
        return Err(AdpError::Contract(format!("invalid schedule: {v}")));
    }
    if powers.len() < horizon {
        return Err(AdpError::Contract(
            "power schedule shorter than horizon".into(),
        ));
    }

    let mut history: Vec<CostTable> = vec![j0.clone()];
    let mut steps = Vec::with_capacity(horizon);
    for k in 0..horizon {
        let current = history[k].clone();
        let error = realized_norm(&current, oracle.j_star(k), space);
        let mut step = TrajectoryStep::new(
            k,
            current.clone(),
            None,
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            powers.at(k),
        );
        if k + 1 < horizon {
            let mut next = current.clone();
            let mut realized = 0.0_f64;
            for l in 0..partition.n_processors() {
                if !sched.improve_active(l, k) {
                    continue;
                }
                // Delayed view: block i read at τ_{li}(k).
                let mut view = current.clone();
                for i in 0..partition.n_processors() {
                    let tau = sched.delay_source(l, i, k);
                    assert!(
                        tau <= k && k - tau <= sched.t_d,
                        "delay buffer breach: τ={tau} at k={k} (T_d={})",
                        sched.t_d
                    );
                    let source = &history[tau];
                    for &x in partition.owned_states(i) {
                        view.set(x, source.value(x));
                    }
                }
                let powered = operator_power(model, k, OperatorMode::Bellman, powers.at(k), &view)?;
                let perturbed =
                    inject_error(&powered, injector.magnitude(k), injector.seed(), k, space);
                for &x in partition.owned_states(l) {
                    next.set(x, perturbed.value(x));
                    realized = realized
                        .max((perturbed.value(x) - powered.value(x)).abs() / space.weight(x));
                }
            }
            step.injected = injector.magnitude(k);
            step.realized_eval = realized;
            history.push(next);
        }
        steps.push(step);
    }
    Ok(Trajectory::new(
        AlgorithmId::AsyncVi,
        injector.seed(),
        steps,
    ))
}

/// Storage layout of asynchronous online PI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsyncPiMode {
    /// Maintain the full `(V, Q)` pair.
    Full,
    /// Store one scalar `J(x) = Q(x, μ(x))` per state instead of the Q
    /// row, overwriting it with the new V at improvement ticks.
    Reduced,
}

/// Asynchronous online PI with locally disjoint improvement and
/// evaluation ticks.
///
/// Full mode: at an improvement tick, owned states take
/// `V_{k+1}(x) = MF_{k,μ_k}(V_k,Q_k)(x)` with the attaining action as
/// `μ_{k+1}(x)` and Q carried; at an evaluation tick, owned rows take
/// `Q_{k+1}(x,u) = F_{k,μ_k}(V_k,Q_k)(x,u)` with V and μ carried. The
/// recorded error is `‖(V_k,Q_k) − (J_k*,Q_k*)‖`.
///
/// Reduced mode keeps `(V, J, μ)` with `min{V_k, J_k}` as continuation
/// and records the V-error `‖V_k − J_k*‖`.
#[allow(clippy::too_many_arguments)]
pub fn run_async_online_pi<M: AbstractModel + ?Sized>(
    model: &M,
    oracle: &Oracle,
    v0: &CostTable,
    q0: &QTable,
    mu0: &Policy,
    partition: &Partition,
    sched: &AsyncSchedule,
    mode: AsyncPiMode,
) -> Result<Trajectory> {
    let horizon = model.horizon();
    let space = model.space();
    if partition.n_states() != model.n_states() {
        return Err(AdpError::DimensionMismatch {
            expected: model.n_states(),
            actual: partition.n_states(),
        });
    }
    check_policy(model, mu0)?;
    let violations = sched.validate(partition.n_processors(), horizon, true);
    if let Some(v) = violations.first() {
        return Err(AdpError::Contract(format!("invalid schedule: {v}")));
    }

    let mut v = v0.clone();
    let mut q = q0.clone();
    // Reduced mode stores J(x) = Q(x, μ(x)) in place of the Q rows.
    let mut j_scalar = CostTable::from_values(
        (0..model.n_states())
            .map(|x| q0.value_for_action(model, x, mu0.action(x)))
            .collect(),
    )?;
    let mut mu = mu0.clone();
    let mut steps = Vec::with_capacity(horizon);

    for k in 0..horizon {
        let error = match mode {
            AsyncPiMode::Full => {
                let gap = VQPair {
                    v: v.clone(),
                    q: q.clone(),
                }
                .sub(&VQPair {
                    v: oracle.j_star(k).clone(),
                    q: oracle.q_star(k).clone(),
                });
                vq_norm(&gap, space)?
            }
            AsyncPiMode::Reduced => realized_norm(&v, oracle.j_star(k), space),
        };
        steps.push(TrajectoryStep::new(
            k,
            v.clone(),
            Some(mu.clone()),
            oracle.j_star(k).clone(),
            oracle.mu_star(k).clone(),
            error,
            1,
        ));
        if k + 1 >= horizon {
            continue;
        }
        let mut next_v = v.clone();
        let mut next_q = q.clone();
        let mut next_j = j_scalar.clone();
        let mut next_mu = mu.actions().to_vec();
        match mode {
            AsyncPiMode::Full => {
                // Both tick kinds read the same (V_k, Q_k, μ_k).
                let any_improve = (0..partition.n_processors()).any(|l| sched.improve_active(l, k));
                let any_evaluate =
                    (0..partition.n_processors()).any(|l| sched.evaluate_active(l, k));
                let improved = if any_improve {
                    Some(mf_mapping(model, k, &mu, &v, &q)?)
                } else {
                    None
                };
                let evaluated = if any_evaluate {
                    Some(f_mapping(model, k, &mu, &v, &q)?)
                } else {
                    None
                };
                for l in 0..partition.n_processors() {
                    if sched.improve_active(l, k) {
                        let (mf_cost, mf_policy) = improved.as_ref().expect("computed above");
                        for &x in partition.owned_states(l) {
                            next_v.set(x, mf_cost.value(x));
                            next_mu[x] = mf_policy.action(x);
                        }
                    } else if sched.evaluate_active(l, k) {
                        let f = evaluated.as_ref().expect("computed above");
                        for &x in partition.owned_states(l) {
                            for pos in 0..model.feasible_actions(x).len() {
                                next_q.set(x, pos, f.get(x, pos));
                            }
                        }
                    }
                }
            }
            AsyncPiMode::Reduced => {
                let w = v.min_with(&j_scalar);
                for l in 0..partition.n_processors() {
                    if sched.improve_active(l, k) {
                        for &x in partition.owned_states(l) {
                            let feasible = model.feasible_actions(x);
                            let mut best = model.mapping(k, x, feasible[0], &w);
                            let mut best_u = feasible[0];
                            for &u in &feasible[1..] {
                                let h = model.mapping(k, x, u, &w);
                                if h < best {
                                    best = h;
                                    best_u = u;
                                }
                            }
                            next_v.set(x, best);
                            next_j.set(x, best);
                            next_mu[x] = best_u;
                        }
                    } else if sched.evaluate_active(l, k) {
                        for &x in partition.owned_states(l) {
                            next_j.set(x, model.mapping(k, x, mu.action(x), &w));
                        }
                    }
                }
            }
        }
        v = next_v;
        q = next_q;
        j_scalar = next_j;
        mu = Policy::new(next_mu);
    }
    Ok(Trajectory::new(AlgorithmId::AsyncPi, 0, steps))
}
