//! Closed-form evaluation of the tracking-error bounds, the λ-coefficient
//! sandwich check, and the limsup helper they all close with.
//!
//! Every calculator takes measured constants (drift report, realized
//! injection magnitudes, schedule bounds, recorded anchors) and evaluates
//! the published formula exactly. Asymptotic bounds are compared against
//! a tail-window maximum after burn-in, the finitely observable surrogate
//! for a limsup.

use serde::Serialize;

use crate::error::{AdpError, Result};
use crate::model::{apply_bellman_operator, operator_power, AbstractModel, OperatorMode};
use crate::oracle::DriftReport;
use crate::space::CostTable;
use crate::trajectory::Trajectory;

/// Every constant the bound formulas consume.
///
/// Per-step sequences are kept alongside the horizon maxima: the closed
/// formulas use the maxima, while the stepwise variants replay the
/// underlying recursions with the per-step values for a tighter curve.
#[derive(Clone, Debug, Serialize)]
pub struct BoundParams {
    pub alpha: f64,
    /// Per-step `m_k` as recorded in the trajectory.
    pub m: Vec<usize>,
    pub m_d: usize,
    pub m_s: usize,
    pub rho: f64,
    pub rho_steps: Vec<f64>,
    pub gamma1: f64,
    pub gamma1_steps: Vec<f64>,
    pub gamma2: f64,
    pub gamma2_steps: Vec<f64>,
    pub eta1: f64,
    pub eta1_steps: Vec<f64>,
    pub eta2: f64,
    pub eta3: f64,
    pub rho_bar: f64,
    /// Injection maxima, realized: `e` for VI, `(ε₁, δ₁)` for approximate
    /// PI, `(ε, δ)` for approximate optimistic PI.
    pub e: f64,
    pub eps1: f64,
    pub delta1: f64,
    pub eps: f64,
    pub delta: f64,
    pub t_a: usize,
    pub t_d: usize,
    /// `‖J_0 − J_0*‖`.
    pub initial_gap: f64,
    /// `‖J_{0,μ_0} − J_0*‖`.
    pub initial_policy_gap: f64,
    /// `M(T_{1,μ₁}J_0 − J_0)`.
    pub m_r1: f64,
    /// `M(T_{1,μ₁}^{m₁}J_0 − J_1*)`.
    pub m_t1: f64,
    /// `c ≥ 0` with `J_0 ≥ T_0J_0 − c·ν`.
    pub c: f64,
}

impl BoundParams {
    /// A zeroed parameter set for `alpha` and a power schedule; callers
    /// fill in what their bound needs.
    pub fn new(alpha: f64, m: Vec<usize>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(AdpError::Contract(format!(
                "contraction modulus must lie in (0,1), got {alpha}"
            )));
        }
        if m.contains(&0) {
            return Err(AdpError::Contract("m_k must be ≥ 1".into()));
        }
        let m_d = m.iter().copied().min().unwrap_or(1);
        let m_s = m.iter().copied().max().unwrap_or(1);
        Ok(BoundParams {
            alpha,
            m,
            m_d,
            m_s,
            rho: 0.0,
            rho_steps: Vec::new(),
            gamma1: 0.0,
            gamma1_steps: Vec::new(),
            gamma2: 0.0,
            gamma2_steps: Vec::new(),
            eta1: 0.0,
            eta1_steps: Vec::new(),
            eta2: 0.0,
            eta3: 0.0,
            rho_bar: 0.0,
            e: 0.0,
            eps1: 0.0,
            delta1: 0.0,
            eps: 0.0,
            delta: 0.0,
            t_a: 0,
            t_d: 0,
            initial_gap: 0.0,
            initial_policy_gap: 0.0,
            m_r1: 0.0,
            m_t1: 0.0,
            c: 0.0,
        })
    }

    /// Copies the drift constants out of a measured report.
    pub fn with_drift(mut self, drift: &DriftReport) -> Self {
        self.rho = drift.rho.max;
        self.rho_steps = drift.rho.per_step.clone();
        self.gamma1 = drift.gamma1.max;
        self.gamma1_steps = drift.gamma1.per_step.clone();
        self.gamma2 = drift.gamma2.max;
        self.gamma2_steps = drift.gamma2.per_step.clone();
        self.eta1 = drift.eta1.max;
        self.eta1_steps = drift.eta1.per_step.clone();
        self.eta2 = drift.eta2.max;
        self.eta3 = drift.eta3.max;
        self.rho_bar = drift.rho_bar.max;
        self
    }

    fn sum_m(&self, range: std::ops::Range<usize>) -> u32 {
        self.m[range].iter().map(|&v| v as u32).sum()
    }

    fn eta1_at(&self, s: usize) -> f64 {
        self.eta1_steps.get(s).copied().unwrap_or(self.eta1)
    }
}

/// The t1 tracking curve for approximate online VI:
/// `α^{Σ_{s<k} m_s}·‖J_0 − J_0*‖ + (ρ + e)/(1 − α^{m_d})`.
pub fn bound_vi_t1(p: &BoundParams, k: usize) -> f64 {
    let decay = p.alpha.powi(p.sum_m(0..k) as i32);
    decay * p.initial_gap + (p.rho + p.e) / (1.0 - p.alpha.powi(p.m_d as i32))
}

/// Stepwise variant of the t1 recursion with per-step constants:
/// `err_{k+1} ≤ α^{m_k}·err_k + ρ_k + e_k`.
pub fn bound_vi_t1_stepwise(p: &BoundParams, e_steps: &[f64], k: usize) -> f64 {
    let mut bound = p.initial_gap;
    for s in 0..k {
        let rho_s = p.rho_steps.get(s).copied().unwrap_or(p.rho);
        let e_s = e_steps.get(s).copied().unwrap_or(p.e);
        bound = p.alpha.powi(p.m[s] as i32) * bound + rho_s + e_s;
    }
    bound
}

/// Which PI bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiVariant {
    /// t2: exact online PI.
    Exact,
    /// t3: approximate online PI with `r₁ = γ₁ + γ₂ + (ε₁ + 2αδ₁)/(1 − α)`.
    Approximate,
}

/// The t2/t3 tracking curve for online PI:
/// `α^k·‖J_{0,μ_0} − J_0*‖ + r/(1 − α)` with `r = γ₁ + γ₂` (exact) or `r₁`.
pub fn bound_pi_t2_t3(p: &BoundParams, k: usize, variant: PiVariant) -> f64 {
    let r = match variant {
        PiVariant::Exact => p.gamma1 + p.gamma2,
        PiVariant::Approximate => {
            p.gamma1 + p.gamma2 + (p.eps1 + 2.0 * p.alpha * p.delta1) / (1.0 - p.alpha)
        }
    };
    p.alpha.powi(k as i32) * p.initial_policy_gap + r / (1.0 - p.alpha)
}

/// Stepwise variant of the t2/t3 recursion:
/// `err_{k+1} ≤ α·err_k + γ_{1,k} + γ_{2,k} (+ (ε₁ + 2αδ₁)/(1 − α))`.
pub fn bound_pi_stepwise(p: &BoundParams, k: usize, variant: PiVariant) -> f64 {
    let extra = match variant {
        PiVariant::Exact => 0.0,
        PiVariant::Approximate => (p.eps1 + 2.0 * p.alpha * p.delta1) / (1.0 - p.alpha),
    };
    let mut bound = p.initial_policy_gap;
    for s in 0..k {
        let g1 = p.gamma1_steps.get(s).copied().unwrap_or(p.gamma1);
        let g2 = p.gamma2_steps.get(s).copied().unwrap_or(p.gamma2);
        bound = p.alpha * bound + g1 + g2 + extra;
    }
    bound
}

/// The λ-coefficients of the optimistic-PI sandwich:
/// `λ_0(c) = c` and, for `k ≥ 1`,
/// `λ_k(c) = Σ_{s<k} η_{1,s}·Π_{l=s+1}^{k−1} α_l^{m_l} + c·Π_{l<k} α_l^{m_l}`
/// with the empty product equal to 1.
pub fn lambda_coefficient(
    c: f64,
    k: usize,
    eta1_seq: &[f64],
    alpha_seq: &[f64],
    m_seq: &[usize],
) -> f64 {
    if k == 0 {
        return c;
    }
    let factor = |l: usize| alpha_seq[l].powi(m_seq[l] as i32);
    let mut total = 0.0;
    for s in 0..k {
        let mut tail = 1.0;
        for l in s + 1..k {
            tail *= factor(l);
        }
        total += eta1_seq[s] * tail;
    }
    let mut full = 1.0;
    for l in 0..k {
        full *= factor(l);
    }
    total + c * full
}

fn lambda_from_params(p: &BoundParams, k: usize) -> f64 {
    let alpha_seq = vec![p.alpha; k];
    let eta1_seq: Vec<f64> = (0..k).map(|s| p.eta1_at(s)).collect();
    lambda_coefficient(p.c, k, &eta1_seq, &alpha_seq, &p.m[..k.min(p.m.len())])
}

/// One componentwise failure of the λ-sandwich.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichViolation {
    pub k: usize,
    pub state: usize,
    /// `"upper"` when `T_kJ_k + α/(1−α)·λ_k·ν ≥ J_{k+1}` failed,
    /// `"lower"` when `J_{k+1} ≥ T_{k+1}J_{k+1} − λ_{k+1}·ν` failed.
    pub side: &'static str,
    pub gap: f64,
}

/// Checks the sandwich
/// `T_kJ_k + α/(1−α)·λ_k(c)·ν ≥ J_{k+1} ≥ T_{k+1}J_{k+1} − λ_{k+1}(c)·ν`
/// componentwise at every recorded step, at tolerance 1e-9.
pub fn check_sandwich_lemma1<M: AbstractModel + ?Sized>(
    model: &M,
    traj: &Trajectory,
    p: &BoundParams,
) -> Result<Vec<SandwichViolation>> {
    const TOL: f64 = 1e-9;
    let space = model.space();
    let alpha = p.alpha;
    let mut out = Vec::new();
    for k in 0..traj.horizon().saturating_sub(1) {
        let j_k = &traj.steps[k].iterate;
        let j_next = &traj.steps[k + 1].iterate;
        let (t_k, _) = apply_bellman_operator(model, k, j_k)?;
        let (t_next, _) = apply_bellman_operator(model, k + 1, j_next)?;
        let lambda_k = lambda_from_params(p, k);
        let lambda_next = lambda_from_params(p, k + 1);
        let upper = t_k.add_scaled_weights(alpha / (1.0 - alpha) * lambda_k, space);
        let lower = t_next.add_scaled_weights(-lambda_next, space);
        for x in 0..model.n_states() {
            if j_next.value(x) > upper.value(x) + TOL {
                out.push(SandwichViolation {
                    k,
                    state: x,
                    side: "upper",
                    gap: j_next.value(x) - upper.value(x),
                });
            }
            if j_next.value(x) < lower.value(x) - TOL {
                out.push(SandwichViolation {
                    k,
                    state: x,
                    side: "lower",
                    gap: lower.value(x) - j_next.value(x),
                });
            }
        }
    }
    Ok(out)
}

/// The t4 two-sided envelope for optimistic PI at step `k`, as full tables:
///
/// lower: `−λ_k(c)·ν/(1 − α)`;
/// upper: `α^k‖J_0 − J_0*‖·ν + Σ_{l<k}(J_l* − J_{l+1}*)
///         + Σ_{l=1}^{k−1}(T_l^{k−l} − T_{l−1}^{k−l})J_l + e_k′·ν`
/// with `e_k′ = Σ_{l<k} α^{k−l}·λ_l(c)/(1 − α)`.
///
/// The containment claim is `J_k − J_k* ∈ [lower, upper]` componentwise.
/// Operator powers are re-evaluated from the stored iterates, `O(k)`
/// applications per summand.
pub fn bound_optimistic_t4<M: AbstractModel + ?Sized>(
    model: &M,
    traj: &Trajectory,
    p: &BoundParams,
    k: usize,
) -> Result<(CostTable, CostTable)> {
    if k >= traj.horizon() {
        return Err(AdpError::Contract(format!(
            "step {k} outside the recorded horizon {}",
            traj.horizon()
        )));
    }
    let space = model.space();
    let n = model.n_states();
    let alpha = p.alpha;
    let lambda_k = lambda_from_params(p, k);
    let lower = CostTable::zeros(n).add_scaled_weights(-lambda_k / (1.0 - alpha), space);

    let mut upper =
        CostTable::zeros(n).add_scaled_weights(alpha.powi(k as i32) * p.initial_gap, space);
    for l in 0..k {
        upper = upper.add(
            &traj.steps[l]
                .oracle_cost
                .sub(&traj.steps[l + 1].oracle_cost),
        );
    }
    for l in 1..k {
        let j_l = &traj.steps[l].iterate;
        let now = operator_power(model, l, OperatorMode::Bellman, k - l, j_l)?;
        let before = operator_power(model, l - 1, OperatorMode::Bellman, k - l, j_l)?;
        upper = upper.add(&now.sub(&before));
    }
    let mut e_prime = 0.0;
    for l in 0..k {
        e_prime += alpha.powi((k - l) as i32) * lambda_from_params(p, l) / (1.0 - alpha);
    }
    upper = upper.add_scaled_weights(e_prime, space);
    Ok((lower, upper))
}

/// The t5 constants derived from a parameter set:
/// `ε₁ = ε + (1+α)δ + (2+α)η₂`,
/// `ε₂ = (α − α^{m_s})ε₁/((1−α)(1−α^{m_d})) + ε + η₂ + η₃ + α(δ + η₂)`,
/// `c₁ = (α − α^{m_s})/(1−α)·M(T_{1,μ₁}J_0 − J_0)`, `β = α^{m_d}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct T5Constants {
    pub eps1: f64,
    pub eps2: f64,
    pub c1: f64,
    pub beta: f64,
}

pub fn t5_constants(p: &BoundParams) -> T5Constants {
    let alpha = p.alpha;
    let eps1 = p.eps + (1.0 + alpha) * p.delta + (2.0 + alpha) * p.eta2;
    let ms_gap = alpha - alpha.powi(p.m_s as i32);
    let beta = alpha.powi(p.m_d as i32);
    let eps2 = ms_gap * eps1 / ((1.0 - alpha) * (1.0 - beta))
        + p.eps
        + p.eta2
        + p.eta3
        + alpha * (p.delta + p.eta2);
    let c1 = ms_gap / (1.0 - alpha) * p.m_r1;
    T5Constants {
        eps1,
        eps2,
        c1,
        beta,
    }
}

/// The t5 tracking curve for approximate online optimistic PI at `k ≥ 1`:
///
/// `α^{Σ_{l=1}^k m_l}/(1−α)·M(T_{1,μ₁}J_0 − J_0) + α^{k−1}·M(T_{1,μ₁}^{m₁}J_0 − J_1*)
///  + c₁β^{⌈k/2⌉}/(1−β) + c₁βα^{⌊k/2⌋}/(1−α)
///  + α^{m_k}ε₁/((1−α)(1−α^{m_d})) + ε₂/(1−α)`.
pub fn bound_approx_optimistic_t5(p: &BoundParams, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(AdpError::Contract("the t5 curve starts at k = 1".into()));
    }
    let alpha = p.alpha;
    let consts = t5_constants(p);
    let sum_m = p.sum_m(1..(k + 1).min(p.m.len()));
    let m_k = p.m.get(k).copied().unwrap_or(p.m_d);
    let half_up = k.div_ceil(2);
    let half_down = k / 2;
    Ok(alpha.powi(sum_m as i32) / (1.0 - alpha) * p.m_r1
        + alpha.powi(k as i32 - 1) * p.m_t1
        + consts.c1 * consts.beta.powi(half_up as i32) / (1.0 - consts.beta)
        + consts.c1 * consts.beta * alpha.powi(half_down as i32) / (1.0 - alpha)
        + alpha.powi(m_k as i32) * consts.eps1 / ((1.0 - alpha) * (1.0 - consts.beta))
        + consts.eps2 / (1.0 - alpha))
}

/// The asymptotic tail of the t5 curve:
/// `α̂·ε₁/((1−α)(1−α^{m_d})) + ε₂/(1−α)` with `α̂ = α^{liminf m_k}`
/// (the schedule minimum stands in for the liminf on a finite horizon).
pub fn bound_approx_optimistic_t5_tail(p: &BoundParams) -> f64 {
    let alpha = p.alpha;
    let consts = t5_constants(p);
    let alpha_hat = alpha.powi(p.m_d as i32);
    alpha_hat * consts.eps1 / ((1.0 - alpha) * (1.0 - consts.beta)) + consts.eps2 / (1.0 - alpha)
}

/// Which asynchronous bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsyncBound {
    /// t6, asynchronous VI: `(ρ(T_a + α^{m_d}T_d) + e)/(1 − α^{m_d})`.
    T6,
    /// t7, asynchronous PI: `ρ̄·T_a/(1 − α)`.
    T7,
}

/// Asymptotic bounds for the asynchronous algorithms; consumers compare
/// them against a tail-window maximum.
pub fn bound_async(p: &BoundParams, which: AsyncBound) -> f64 {
    match which {
        AsyncBound::T6 => {
            let beta = p.alpha.powi(p.m_d as i32);
            (p.rho * (p.t_a as f64 + beta * p.t_d as f64) + p.e) / (1.0 - beta)
        }
        AsyncBound::T7 => p.rho_bar * p.t_a as f64 / (1.0 - p.alpha),
    }
}

/// The limsup closure: a positive sequence with `a_k ≤ b + τ·a_{k−δ_k}`
/// eventually satisfies `limsup a_k ≤ b/(1 − τ)`.
pub fn limsup_bound(b: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(AdpError::Contract(format!(
            "τ must lie strictly inside (0,1), got {tau}"
        )));
    }
    Ok(b / (1.0 - tau))
}

/// Max over the final `window` entries, after checking the burn-in
/// precedes the window. The finite-horizon surrogate for a limsup claim.
pub fn tail_window_max(values: &[f64], burn_in: usize, window: usize) -> Result<f64> {
    if window == 0 || window > values.len() {
        return Err(AdpError::Contract(format!(
            "tail window {window} invalid for {} recorded steps",
            values.len()
        )));
    }
    if burn_in > values.len() - window {
        return Err(AdpError::Contract(format!(
            "burn-in {burn_in} overlaps the tail window of {window} steps"
        )));
    }
    Ok(values[values.len() - window..]
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b)))
}

/// Default tail sizing: window `⌈0.2·K⌉` after a burn-in of `⌈0.3·K⌉`.
pub fn default_tail(horizon: usize) -> (usize, usize) {
    let window = horizon.div_ceil(5).max(1);
    let burn_in = (3 * horizon)
        .div_ceil(10)
        .min(horizon.saturating_sub(window));
    (burn_in, window)
}
