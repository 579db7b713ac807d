//! Minimal end-to-end run: approximate online VI on the two-state
//! instance, printing the per-step tracking error.

use online_adp::models::testbed;
use online_adp::oracle::Oracle;
use online_adp::sync::run_approx_online_vi;
use online_adp::trajectory::{ErrorInjector, PowerSchedule};
use online_adp::{CostTable, Result};

fn main() -> Result<()> {
    let model = testbed::two_state(100);
    let oracle = Oracle::compute(&model)?;
    let traj = run_approx_online_vi(
        &model,
        &oracle,
        &CostTable::zeros(2),
        &PowerSchedule::cycle(100, &[1, 2, 3])?,
        &ErrorInjector::constant(100, 0.02, 7)?,
    )?;
    for step in traj.steps.iter().step_by(10) {
        println!("k={:3}  err={:.6e}", step.k, step.error);
    }
    println!(
        "final tracking error: {:.3e}",
        traj.errors().last().unwrap()
    );
    Ok(())
}
