//! Concrete model instantiations: online finite-state discounted MDPs,
//! deterministic online optimal control, and seeded scenario generators.

pub mod control;
pub mod mdp;
pub mod scenario;
pub mod testbed;

pub use control::{control_mapping, DeterministicControlModel};
pub use mdp::{mdp_mapping, validate_stage, MdpKernel, StageCost, StageSequence, StageViolation};
pub use scenario::{generate_scenario, ScenarioKind, ScenarioSpec, Switch};
