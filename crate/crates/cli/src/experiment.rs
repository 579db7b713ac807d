//! End-to-end experiment pipeline: generate the scenario, solve the
//! oracles, run the algorithm, measure drift, evaluate every applicable
//! bound, and write `trajectory.csv` plus `manifest.json`.
//!
//! Everything is a deterministic function of `(config, seed)`; the only
//! volatile manifest field is `wall_clock_ms`.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde::Serialize;

use online_adp::asynchronous::{
    run_async_online_pi, run_async_online_vi, AsyncPiMode, AsyncSchedule,
};
use online_adp::bounds::{
    bound_approx_optimistic_t5, bound_approx_optimistic_t5_tail, bound_async, bound_optimistic_t4,
    bound_pi_stepwise, bound_pi_t2_t3, bound_vi_t1, bound_vi_t1_stepwise, check_sandwich_lemma1,
    t5_constants, tail_window_max, AsyncBound, BoundParams, PiVariant,
};
use online_adp::models::scenario::generate_scenario;
use online_adp::models::StageSequence;
use online_adp::oracle::{measure_drift_constants, DriftReport, Oracle, QTable};
use online_adp::sync::{
    run_approx_online_optimistic_pi, run_approx_online_pi, run_approx_online_vi,
    run_online_optimistic_pi, run_online_pi,
};
use online_adp::trajectory::{AlgorithmId, PowerSchedule, Trajectory};
use online_adp::{AbstractModel, CostTable, Policy};

use crate::config::{
    AlgoParams, ExperimentConfig, InjectionConfig, PartitionConfig, PowersConfig, UsageError,
};
use crate::digest::json_digest;

/// Slack for per-step bound comparisons (double-precision accumulation
/// over the run).
const STEP_TOL: f64 = 1e-9;
/// Slack for tail-window comparisons against asymptotic bounds.
const TAIL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// How much room was left: min over checked points of (bound − value).
    pub margin: f64,
    pub detail: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub scenario_digest: String,
    pub algorithm: String,
    pub horizon: usize,
    pub seed: u64,
    pub alpha: f64,
    pub drift: DriftReport,
    pub bound_constants: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
    pub wall_clock_ms: u128,
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub trajectory: Trajectory,
}

struct ResolvedInputs {
    model: StageSequence,
    horizon: usize,
    seed: u64,
    scenario_digest: String,
}

fn resolve_inputs(
    config: &ExperimentConfig,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<ResolvedInputs> {
    let seed = seed_override.unwrap_or(config.seed);
    let kernel = config.load_kernel(base_dir)?;
    let spec = config.resolve_scenario(seed)?;
    let horizon = spec.horizon;
    let scenario_digest = json_digest(&serde_json::json!({
        "kernel": kernel,
        "scenario": spec,
    }));
    let model = generate_scenario(&kernel, &spec)
        .map_err(|e| anyhow!("scenario generation failed: {e}"))?;
    Ok(ResolvedInputs {
        model,
        horizon,
        seed,
        scenario_digest,
    })
}

fn build_policy(
    params: &AlgoParams,
    model: &StageSequence,
    field: &str,
) -> Result<Policy, UsageError> {
    match &params.mu0 {
        None => Ok(Policy::new(
            (0..model.n_states())
                .map(|x| model.feasible_actions(x)[0])
                .collect(),
        )),
        Some(actions) => {
            if actions.len() != model.n_states() {
                return Err(UsageError {
                    field: field.into(),
                    message: format!(
                        "covers {} states, model has {}",
                        actions.len(),
                        model.n_states()
                    ),
                });
            }
            Ok(Policy::new(actions.clone()))
        }
    }
}

fn build_j0(
    params: &AlgoParams,
    model: &StageSequence,
    field: &str,
) -> Result<CostTable, UsageError> {
    match &params.j0 {
        None => Ok(CostTable::zeros(model.n_states())),
        Some(values) => {
            if values.len() != model.n_states() {
                return Err(UsageError {
                    field: field.into(),
                    message: format!(
                        "covers {} states, model has {}",
                        values.len(),
                        model.n_states()
                    ),
                });
            }
            CostTable::from_values(values.clone()).map_err(|e| UsageError {
                field: field.into(),
                message: e.to_string(),
            })
        }
    }
}

fn run_algorithm(
    config: &ExperimentConfig,
    model: &StageSequence,
    oracle: &Oracle,
    horizon: usize,
    seed: u64,
) -> anyhow::Result<(Trajectory, Option<PowerSchedule>, Option<AsyncSchedule>)> {
    let params = &config.params;
    match config.algorithm {
        AlgorithmId::Avi => {
            let powers = PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            let inj = InjectionConfig::build(
                params.injection.as_ref(),
                horizon,
                seed,
                "params.injection",
            )?;
            let j0 = build_j0(params, model, "params.j0")?;
            let traj = run_approx_online_vi(model, oracle, &j0, &powers, &inj)?;
            Ok((traj, Some(powers), None))
        }
        AlgorithmId::Pi => {
            let mu0 = build_policy(params, model, "params.mu0")?;
            let traj = run_online_pi(model, oracle, &mu0)?;
            Ok((traj, None, None))
        }
        AlgorithmId::Api => {
            let mu0 = build_policy(params, model, "params.mu0")?;
            let eval = InjectionConfig::build(
                params.eval_injection.as_ref(),
                horizon,
                seed,
                "params.eval_injection",
            )?;
            let improve = InjectionConfig::build(
                params.improve_injection.as_ref(),
                horizon,
                seed.wrapping_add(1),
                "params.improve_injection",
            )?;
            let traj = run_approx_online_pi(model, oracle, &mu0, &eval, &improve)?;
            Ok((traj, None, None))
        }
        AlgorithmId::Opi => {
            let powers = PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            let j0 = build_j0(params, model, "params.j0")?;
            let traj = run_online_optimistic_pi(model, oracle, &j0, &powers)?;
            Ok((traj, Some(powers), None))
        }
        AlgorithmId::Aopi => {
            let powers = PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            let j0 = build_j0(params, model, "params.j0")?;
            let eval = InjectionConfig::build(
                params.eval_injection.as_ref(),
                horizon,
                seed,
                "params.eval_injection",
            )?;
            let improve = InjectionConfig::build(
                params.improve_injection.as_ref(),
                horizon,
                seed.wrapping_add(1),
                "params.improve_injection",
            )?;
            let traj =
                run_approx_online_optimistic_pi(model, oracle, &j0, &powers, &improve, &eval)?;
            Ok((traj, Some(powers), None))
        }
        AlgorithmId::AsyncVi => {
            let powers = PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            let inj = InjectionConfig::build(
                params.injection.as_ref(),
                horizon,
                seed,
                "params.injection",
            )?;
            let j0 = build_j0(params, model, "params.j0")?;
            let partition = params
                .partition
                .as_ref()
                .ok_or_else(|| UsageError {
                    field: "params.partition".into(),
                    message: "required for async-vi".into(),
                })?
                .build(model.n_states(), "params.partition")?;
            let sched_cfg = params.schedule.as_ref().ok_or_else(|| UsageError {
                field: "params.schedule".into(),
                message: "required for async-vi".into(),
            })?;
            let sched = sched_cfg.build(partition.n_processors(), horizon, seed);
            let traj = run_async_online_vi(model, oracle, &j0, &partition, &sched, &powers, &inj)?;
            Ok((traj, Some(powers), Some(sched)))
        }
        AlgorithmId::AsyncPi => {
            let mu0 = build_policy(params, model, "params.mu0")?;
            let v0 = build_j0(params, model, "params.j0")?;
            let q0 = QTable::zeros(model);
            let partition = params
                .partition
                .as_ref()
                .unwrap_or(&PartitionConfig::Blocks(1))
                .build(model.n_states(), "params.partition")?;
            let sched_cfg = params.schedule.as_ref().ok_or_else(|| UsageError {
                field: "params.schedule".into(),
                message: "required for async-pi".into(),
            })?;
            let sched = sched_cfg.build(partition.n_processors(), horizon, seed);
            let mode = params.mode.unwrap_or(AsyncPiMode::Full);
            let traj =
                run_async_online_pi(model, oracle, &v0, &q0, &mu0, &partition, &sched, mode)?;
            Ok((traj, None, Some(sched)))
        }
    }
}

/// Builds the bound parameters for a finished run from the measured drift
/// report and the realized injection magnitudes the trajectory recorded.
pub fn assemble_bound_params(
    traj: &Trajectory,
    drift: &DriftReport,
    alpha: f64,
    sched: Option<&AsyncSchedule>,
) -> anyhow::Result<BoundParams> {
    let m: Vec<usize> = traj.steps.iter().map(|s| s.m).collect();
    let mut p = BoundParams::new(alpha, m)?.with_drift(drift);
    let max_injected = traj
        .steps
        .iter()
        .map(|s| s.injected)
        .fold(0.0_f64, f64::max);
    match traj.algorithm {
        AlgorithmId::Avi | AlgorithmId::AsyncVi => {
            p.initial_gap = traj.steps[0].error;
            p.e = max_injected.max(traj.max_realized_eval());
        }
        AlgorithmId::Pi => {
            p.initial_policy_gap = traj.steps[0].error;
        }
        AlgorithmId::Api => {
            p.initial_policy_gap = traj.steps[0].error;
            p.delta1 = max_injected.max(traj.max_realized_eval());
            p.eps1 = traj.max_realized_improve();
        }
        AlgorithmId::Opi => {
            p.initial_gap = traj.steps[0].error;
            p.c = traj.c.unwrap_or(0.0);
        }
        AlgorithmId::Aopi => {
            p.initial_gap = traj.steps[0].error;
            p.delta = max_injected.max(traj.max_realized_eval());
            p.eps = traj.max_realized_improve();
            p.m_r1 = traj.m_r1.ok_or_else(|| anyhow!("missing M_r1 anchor"))?;
            p.m_t1 = traj.m_t1.ok_or_else(|| anyhow!("missing M_t1 anchor"))?;
            // The power at index 0 is never consumed by this algorithm.
            if p.m.len() > 1 {
                p.m_d = p.m[1..].iter().copied().min().unwrap();
                p.m_s = p.m[1..].iter().copied().max().unwrap();
            }
        }
        AlgorithmId::AsyncPi => {}
    }
    if let Some(s) = sched {
        p.t_a = s.t_a;
        p.t_d = s.t_d;
    }
    Ok(p)
}

fn per_step_check(name: &str, errors: &[f64], bounds: &[Option<f64>]) -> CheckResult {
    let mut margin = f64::INFINITY;
    let mut worst_k = 0;
    let mut checked = 0usize;
    for (k, (err, bound)) in errors.iter().zip(bounds).enumerate() {
        if let Some(b) = bound {
            checked += 1;
            if b - err < margin {
                margin = b - err;
                worst_k = k;
            }
        }
    }
    CheckResult {
        name: name.into(),
        pass: checked > 0 && margin >= -STEP_TOL,
        margin,
        detail: format!("min over {checked} steps of bound − err, tightest at k={worst_k}"),
    }
}

fn tail_check(
    name: &str,
    errors: &[f64],
    bound: f64,
    burn_in: usize,
    window: usize,
) -> anyhow::Result<CheckResult> {
    let tail = tail_window_max(errors, burn_in, window)?;
    Ok(CheckResult {
        name: name.into(),
        pass: tail <= bound + TAIL_TOL,
        margin: bound + TAIL_TOL - tail,
        detail: format!("tail max {tail:.6e} over final {window} steps vs bound {bound:.6e}"),
    })
}

/// Fills the per-step bound columns and evaluates every check this
/// algorithm's bound demands. Returns the checks and the assembled
/// constants for the manifest.
pub fn evaluate_bounds(
    traj: &mut Trajectory,
    model: &StageSequence,
    params: &BoundParams,
    tail_burn_in: usize,
    tail_window: usize,
) -> anyhow::Result<(Vec<CheckResult>, serde_json::Value)> {
    let horizon = traj.horizon();
    let errors = traj.errors();
    let mut checks = Vec::new();
    let constants: serde_json::Value;
    match traj.algorithm {
        AlgorithmId::Avi => {
            let e_steps: Vec<f64> = traj.steps.iter().map(|s| s.injected).collect();
            for k in 0..horizon {
                traj.steps[k].bound = Some(bound_vi_t1(params, k));
                traj.steps[k].bound_stepwise = Some(bound_vi_t1_stepwise(params, &e_steps, k));
            }
            let bounds: Vec<Option<f64>> = traj.steps.iter().map(|s| s.bound).collect();
            checks.push(per_step_check("t1_per_step", &errors, &bounds));
            constants = serde_json::json!({
                "rho": params.rho, "e": params.e, "m_d": params.m_d,
                "steady": (params.rho + params.e) / (1.0 - params.alpha.powi(params.m_d as i32)),
            });
        }
        AlgorithmId::Pi | AlgorithmId::Api => {
            let variant = if traj.algorithm == AlgorithmId::Pi {
                PiVariant::Exact
            } else {
                PiVariant::Approximate
            };
            for k in 0..horizon {
                traj.steps[k].bound = Some(bound_pi_t2_t3(params, k, variant));
                traj.steps[k].bound_stepwise = Some(bound_pi_stepwise(params, k, variant));
            }
            let bounds: Vec<Option<f64>> = traj.steps.iter().map(|s| s.bound).collect();
            let name = if variant == PiVariant::Exact {
                "t2_per_step"
            } else {
                "t3_per_step"
            };
            checks.push(per_step_check(name, &errors, &bounds));
            constants = serde_json::json!({
                "gamma1": params.gamma1, "gamma2": params.gamma2,
                "eps1": params.eps1, "delta1": params.delta1,
            });
        }
        AlgorithmId::Opi => {
            // Componentwise containment J_k − J_k* ∈ [lower, upper] plus
            // the λ-sandwich; the scalar bound column is the norm
            // radius of the envelope.
            let mut containment_margin = f64::INFINITY;
            let mut worst = (0usize, 0usize);
            for k in 0..horizon {
                let (lower, upper) = bound_optimistic_t4(model, traj, params, k)?;
                let mut radius = 0.0_f64;
                for x in 0..model.n_states() {
                    let w = model.space().weight(x);
                    let diff = traj.steps[k].iterate.value(x) - traj.steps[k].oracle_cost.value(x);
                    let up_room = upper.value(x) - diff;
                    let low_room = diff - lower.value(x);
                    if up_room.min(low_room) < containment_margin {
                        containment_margin = up_room.min(low_room);
                        worst = (k, x);
                    }
                    radius = radius.max(upper.value(x).abs().max(lower.value(x).abs()) / w);
                }
                traj.steps[k].bound = Some(radius);
            }
            checks.push(CheckResult {
                name: "t4_containment".into(),
                pass: containment_margin >= -STEP_TOL,
                margin: containment_margin,
                detail: format!(
                    "componentwise envelope room, tightest at (k={}, x={})",
                    worst.0, worst.1
                ),
            });
            let violations = check_sandwich_lemma1(model, traj, params)?;
            checks.push(CheckResult {
                name: "lemma1_sandwich".into(),
                pass: violations.is_empty(),
                margin: -(violations.iter().map(|v| v.gap).fold(0.0_f64, f64::max)),
                detail: format!("{} componentwise violations", violations.len()),
            });
            constants = serde_json::json!({ "c": params.c, "eta1": params.eta1 });
        }
        AlgorithmId::Aopi => {
            for k in 1..horizon {
                traj.steps[k].bound = Some(bound_approx_optimistic_t5(params, k)?);
            }
            let bounds: Vec<Option<f64>> = traj.steps.iter().map(|s| s.bound).collect();
            checks.push(per_step_check("t5_per_step", &errors, &bounds));
            let tail_bound = bound_approx_optimistic_t5_tail(params);
            checks.push(tail_check(
                "t5_tail",
                &errors,
                tail_bound,
                tail_burn_in,
                tail_window,
            )?);
            let consts = t5_constants(params);
            constants = serde_json::json!({
                "eps": params.eps, "delta": params.delta,
                "eta2": params.eta2, "eta3": params.eta3,
                "eps1": consts.eps1, "eps2": consts.eps2,
                "c1": consts.c1, "beta": consts.beta,
                "m_r1": params.m_r1, "m_t1": params.m_t1,
            });
        }
        AlgorithmId::AsyncVi => {
            let bound = bound_async(params, AsyncBound::T6);
            for step in traj.steps.iter_mut() {
                step.bound = Some(bound);
            }
            checks.push(tail_check(
                "t6_tail",
                &errors,
                bound,
                tail_burn_in,
                tail_window,
            )?);
            constants = serde_json::json!({
                "rho": params.rho, "e": params.e,
                "t_a": params.t_a, "t_d": params.t_d, "m_d": params.m_d,
                "bound": bound,
            });
        }
        AlgorithmId::AsyncPi => {
            let bound = bound_async(params, AsyncBound::T7);
            for step in traj.steps.iter_mut() {
                step.bound = Some(bound);
            }
            checks.push(tail_check(
                "t7_tail",
                &errors,
                bound,
                tail_burn_in,
                tail_window,
            )?);
            constants = serde_json::json!({
                "rho_bar": params.rho_bar, "t_a": params.t_a, "bound": bound,
            });
        }
    }
    Ok((checks, constants))
}

fn format_cell(v: f64) -> String {
    format!("{v:.16e}")
}

/// The pinned trajectory CSV schema, one row per step. Cells that do not
/// apply (drift members of the last pair, bounds before their start) are
/// empty.
pub const CSV_HEADER: &str = "k,err,bound,bound_stepwise,m_k,e_k,realized_eps,realized_delta,\
rho_k,gamma1_k,eta1_k,rho_bar_k";

pub fn write_trajectory_csv(
    traj: &Trajectory,
    drift: &DriftReport,
    path: &Path,
) -> anyhow::Result<()> {
    let mut out = String::with_capacity(traj.horizon() * 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for step in &traj.steps {
        let k = step.k;
        let drift_cell =
            |series: &[f64]| series.get(k).map(|v| format_cell(*v)).unwrap_or_default();
        let row = [
            k.to_string(),
            format_cell(step.error),
            step.bound.map(format_cell).unwrap_or_default(),
            step.bound_stepwise.map(format_cell).unwrap_or_default(),
            step.m.to_string(),
            format_cell(step.injected),
            format_cell(step.realized_improve),
            format_cell(step.realized_eval),
            drift_cell(&drift.rho.per_step),
            drift_cell(&drift.gamma1.per_step),
            drift_cell(&drift.eta1.per_step),
            drift_cell(&drift.rho_bar.per_step),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Runs one experiment end to end and writes `trajectory.csv` and
/// `manifest.json` into `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    config_json: &serde_json::Value,
    base_dir: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let inputs = resolve_inputs(config, base_dir, seed_override)?;
    let model = &inputs.model;
    let horizon = inputs.horizon;

    let oracle = Oracle::compute(model).map_err(|e| anyhow!("oracle solve failed: {e}"))?;
    let drift = if horizon >= 2 {
        measure_drift_constants(model, &oracle, config.drift_samples.max(1), inputs.seed)?
    } else {
        // A single revealed stage has no consecutive pair to measure.
        empty_drift(model.contraction_modulus())
    };

    let (mut traj, _powers, sched) = run_algorithm(config, model, &oracle, horizon, inputs.seed)?;
    traj.scenario_digest = inputs.scenario_digest.clone();

    let params = assemble_bound_params(&traj, &drift, model.contraction_modulus(), sched.as_ref())?;
    let window = ((config.tail.window_fraction * horizon as f64).ceil() as usize).clamp(1, horizon);
    let burn_in =
        ((config.tail.burn_in_fraction * horizon as f64).ceil() as usize).min(horizon - window);
    let (checks, bound_constants) = evaluate_bounds(&mut traj, model, &params, burn_in, window)?;

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_trajectory_csv(&traj, &drift, &out_dir.join("trajectory.csv"))?;

    let all_pass = checks.iter().all(|c| c.pass);
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: json_digest(config_json),
        scenario_digest: inputs.scenario_digest,
        algorithm: traj.algorithm.as_str().to_string(),
        horizon,
        seed: inputs.seed,
        alpha: model.contraction_modulus(),
        drift,
        bound_constants,
        checks,
        all_pass,
        wall_clock_ms: started.elapsed().as_millis(),
    };
    let manifest_text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(out_dir.join("manifest.json"), manifest_text + "\n")?;
    Ok(RunOutcome {
        manifest,
        trajectory: traj,
    })
}

/// Dry-runs every construction `run` would perform — scenario, initial
/// objects, power/injection schedules, partition, activation schedule —
/// without solving anything. Returns a one-line summary.
pub fn validate_config(config: &ExperimentConfig, base_dir: &Path) -> anyhow::Result<String> {
    let kernel = config.load_kernel(base_dir)?;
    let spec = config.resolve_scenario(config.seed)?;
    spec.validate()?;
    let violations = online_adp::models::validate_stage(&kernel, &spec.base_cost);
    if let Some(v) = violations.first() {
        return Err(UsageError {
            field: "scenario.base_cost".into(),
            message: format!("{v} ({} violations total)", violations.len()),
        }
        .into());
    }
    let horizon = spec.horizon;
    let model = generate_scenario(&kernel, &spec)?;
    let params = &config.params;
    match config.algorithm {
        AlgorithmId::Avi => {
            PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            InjectionConfig::build(params.injection.as_ref(), horizon, 0, "params.injection")?;
            build_j0(params, &model, "params.j0")?;
        }
        AlgorithmId::Pi => {
            build_policy(params, &model, "params.mu0")?;
        }
        AlgorithmId::Api => {
            build_policy(params, &model, "params.mu0")?;
            InjectionConfig::build(
                params.eval_injection.as_ref(),
                horizon,
                0,
                "params.eval_injection",
            )?;
            InjectionConfig::build(
                params.improve_injection.as_ref(),
                horizon,
                0,
                "params.improve_injection",
            )?;
        }
        AlgorithmId::Opi => {
            PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            build_j0(params, &model, "params.j0")?;
        }
        AlgorithmId::Aopi => {
            PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
            build_j0(params, &model, "params.j0")?;
            InjectionConfig::build(
                params.eval_injection.as_ref(),
                horizon,
                0,
                "params.eval_injection",
            )?;
            InjectionConfig::build(
                params.improve_injection.as_ref(),
                horizon,
                0,
                "params.improve_injection",
            )?;
        }
        AlgorithmId::AsyncVi | AlgorithmId::AsyncPi => {
            if config.algorithm == AlgorithmId::AsyncVi {
                PowersConfig::build(params.powers.as_ref(), horizon, "params.powers")?;
                InjectionConfig::build(params.injection.as_ref(), horizon, 0, "params.injection")?;
            } else {
                build_policy(params, &model, "params.mu0")?;
            }
            let partition = params
                .partition
                .as_ref()
                .unwrap_or(&PartitionConfig::Blocks(1))
                .build(model.n_states(), "params.partition")?;
            let sched_cfg = params.schedule.as_ref().ok_or_else(|| UsageError {
                field: "params.schedule".into(),
                message: "required for asynchronous algorithms".into(),
            })?;
            let sched = sched_cfg.build(partition.n_processors(), horizon, config.seed);
            let needs_eval = config.algorithm == AlgorithmId::AsyncPi;
            let schedule_violations = sched.validate(partition.n_processors(), horizon, needs_eval);
            if let Some(v) = schedule_violations.first() {
                return Err(UsageError {
                    field: "params.schedule".into(),
                    message: format!("{v} ({} violations total)", schedule_violations.len()),
                }
                .into());
            }
        }
    }
    Ok(format!(
        "config ok: algorithm={}, horizon={horizon}, {} states, α={}",
        config.algorithm,
        model.n_states(),
        model.contraction_modulus()
    ))
}

fn empty_drift(alpha: f64) -> DriftReport {
    use online_adp::oracle::DriftSeries;
    let empty = || DriftSeries {
        per_step: Vec::new(),
        max: 0.0,
        certified: true,
    };
    DriftReport {
        alpha,
        rho: empty(),
        gamma1: empty(),
        gamma2: empty(),
        eta1: empty(),
        eta2: empty(),
        eta3: empty(),
        rho_bar: empty(),
    }
}

/// The bound column label used for an algorithm's series in plot data.
pub fn bound_series_name(algorithm: AlgorithmId) -> &'static str {
    match algorithm {
        AlgorithmId::Avi => "bound_t1",
        AlgorithmId::Pi => "bound_t2",
        AlgorithmId::Api => "bound_t3",
        AlgorithmId::Opi => "bound_t4",
        AlgorithmId::Aopi => "bound_t5",
        AlgorithmId::AsyncVi => "bound_t6",
        AlgorithmId::AsyncPi => "bound_t7",
    }
}
