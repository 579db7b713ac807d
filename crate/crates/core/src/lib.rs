//! Online abstract dynamic programming with contractive models.
//!
//! A family of time-varying stage mappings `H_k(x, u, J)` is revealed one
//! step at a time; the goal at each step is the fixed point of the
//! current Bellman operator, and the quantity of interest is how closely
//! an online algorithm tracks that moving target. This crate provides:
//!
//! - the abstract model interface with its weighted sup-norm machinery
//!   and time-indexed operators ([`model`], [`space`]);
//! - concrete finite models: online discounted MDPs, deterministic online
//!   optimal control, and seeded scenario generators ([`models`]);
//! - exact per-step oracles (policy cost, optimal cost, Q-factors) and
//!   measured drift constants ([`oracle`]);
//! - the synchronous online algorithms: approximate VI, exact and
//!   approximate PI, exact and approximate optimistic PI ([`sync`]);
//! - asynchronous VI and PI under simulated logical asynchrony with
//!   partitioned states, activation windows, and bounded delays
//!   ([`asynchronous`]);
//! - closed-form tracking-error bounds with sandwich and containment
//!   checks ([`bounds`]).

pub mod asynchronous;
pub mod bounds;
pub mod error;
pub mod linalg;
pub mod model;
pub mod models;
pub mod oracle;
pub(crate) mod seeded;
pub mod space;
pub mod sync;
pub mod trajectory;

pub use error::{AdpError, Result};
pub use model::{
    apply_bellman_operator, apply_policy_operator, operator_power, AbstractModel, AffineOperator,
    OperatorMode,
};
pub use oracle::{
    compute_q_star, measure_drift_constants, solve_optimal, solve_policy_cost, DriftReport,
    DriftSeries, Oracle, QTable,
};
pub use space::{semilinear_gap, weighted_sup_norm, CostTable, Policy, StateSpace};
pub use trajectory::{
    inject_error, AlgorithmId, ErrorInjector, InjectorMode, PowerSchedule, Trajectory,
    TrajectoryStep,
};
