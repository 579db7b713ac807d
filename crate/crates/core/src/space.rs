//! Finite state spaces, cost functions on them, and the weighted sup-norm.
//!
//! A [`CostTable`] is an element of the space of bounded functions on the
//! state set; everything the algorithms iterate on is one of these. The
//! norm is `‖J‖ = max_x |J(x)| / ν(x)` for a positive weight function ν,
//! and the one-sided variant `M(y) = max_x y(x) / ν(x)` (no absolute
//! value, may be negative) drives the semilinear contraction machinery.

use serde::{Deserialize, Serialize};

use crate::error::{AdpError, Result};

/// A finite state set together with the positive weight function ν.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateSpaceData")]
pub struct StateSpace {
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct StateSpaceData {
    weights: Vec<f64>,
}

impl TryFrom<StateSpaceData> for StateSpace {
    type Error = AdpError;
    fn try_from(raw: StateSpaceData) -> Result<Self> {
        StateSpace::with_weights(raw.weights)
    }
}

impl StateSpace {
    /// The unweighted space (ν ≡ 1) on `n_states` states.
    pub fn unweighted(n_states: usize) -> Self {
        assert!(n_states >= 1, "state space must be nonempty");
        StateSpace {
            weights: vec![1.0; n_states],
        }
    }

    /// A space with user-supplied positive weights.
    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(AdpError::Contract("state space must be nonempty".into()));
        }
        if let Some(x) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(AdpError::Contract(format!(
                "weight at state {x} must be a positive finite number, got {}",
                weights[x]
            )));
        }
        Ok(StateSpace { weights })
    }

    pub fn n_states(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether ν ≡ 1, the default for all shipped models.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_states() {
            return Err(AdpError::DimensionMismatch {
                expected: self.n_states(),
                actual: len,
            });
        }
        Ok(())
    }
}

/// A real-valued function on the state set; the iterate of every algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    values: Vec<f64>,
}

impl CostTable {
    pub fn zeros(n_states: usize) -> Self {
        CostTable {
            values: vec![0.0; n_states],
        }
    }

    /// Builds a table from raw values; every entry must be finite.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(AdpError::Contract("cost table must be nonempty".into()));
        }
        if let Some(x) = values.iter().position(|v| !v.is_finite()) {
            return Err(AdpError::Contract(format!(
                "cost table entry at state {x} is not finite: {}",
                values[x]
            )));
        }
        Ok(CostTable { values })
    }

    /// Constant table `c` at every state.
    pub fn constant(n_states: usize, c: f64) -> Self {
        CostTable {
            values: vec![c; n_states],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set(&mut self, x: usize, v: f64) {
        self.values[x] = v;
    }

    /// Componentwise difference `self − other`.
    pub fn sub(&self, other: &CostTable) -> CostTable {
        assert_eq!(self.len(), other.len(), "cost table length mismatch");
        CostTable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Componentwise sum.
    pub fn add(&self, other: &CostTable) -> CostTable {
        assert_eq!(self.len(), other.len(), "cost table length mismatch");
        CostTable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise minimum `min{self, other}`.
    pub fn min_with(&self, other: &CostTable) -> CostTable {
        assert_eq!(self.len(), other.len(), "cost table length mismatch");
        CostTable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.min(*b))
                .collect(),
        }
    }

    /// `self + c·ν` for a scalar c, with ν the weights of `space`.
    pub fn add_scaled_weights(&self, c: f64, space: &StateSpace) -> CostTable {
        assert_eq!(self.len(), space.n_states(), "cost table length mismatch");
        CostTable {
            values: self
                .values
                .iter()
                .zip(space.weights())
                .map(|(v, w)| v + c * w)
                .collect(),
        }
    }

    /// `true` iff `self(x) ≤ other(x) + tol` for every state.
    pub fn le_within(&self, other: &CostTable, tol: f64) -> bool {
        assert_eq!(self.len(), other.len(), "cost table length mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| *a <= *b + tol)
    }
}

/// The weighted sup-norm `‖J‖ = max_x |J(x)| / ν(x)`.
pub fn weighted_sup_norm(j: &CostTable, space: &StateSpace) -> Result<f64> {
    space.check_len(j.len())?;
    Ok(j.values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v.abs() / w)
        .fold(0.0_f64, f64::max))
}

/// The one-sided gap `M(y) = max_x y(x) / ν(x)`.
///
/// Unlike the norm this is sign-preserving: `M(y) ≤ ‖y‖` always, with
/// equality when `y ≥ 0`, and `M(y)` is negative when `y < 0` everywhere.
pub fn semilinear_gap(y: &CostTable, space: &StateSpace) -> Result<f64> {
    space.check_len(y.len())?;
    Ok(y.values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v / w)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// A stationary policy: one feasible action id per state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    actions: Vec<usize>,
}

impl Policy {
    pub fn new(actions: Vec<usize>) -> Self {
        assert!(!actions.is_empty(), "policy must cover at least one state");
        Policy { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action(&self, x: usize) -> usize {
        self.actions[x]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }
}
