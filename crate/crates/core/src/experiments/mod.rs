//! Configuration, reports and the scripted studies behind the `avolterra`
//! command-line tool.
//!
//! Every command reads a [`RunConfig`] (all sections optional), fills the gaps
//! with documented defaults, and returns an [`ExperimentReport`]: one row per
//! computed quantity, with a pass flag on every declared check, plus CSV
//! artifacts. Nothing in a report depends on the wall clock or thread count.

mod basic;
mod config;
mod convergence;
mod report;
mod stability;
mod validate;

pub use basic::{run_cf, run_hawkes_simulate, run_price, run_riccati};
pub use config::{
    Coefficients, Command, ExperimentConfig, Family, GridConfig, HestonParams, RunConfig, ScalingConfig, SimulationConfig, DEFAULT_SEED,
};
pub use convergence::{convergence_study, run_convergence, ConvergenceStudy};
pub use report::{Artifact, ExperimentReport, ReportRow};
pub use stability::{approximant, run_stability, stability_rows, StabilityRow};
pub use validate::{run_hawkes_validate, run_lift_validate, run_modulus_check};

use crate::error::Result;

/// Run `command` under `config`.
pub fn run(command: Command, config: &RunConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(command.name(), config.seed());
    match command {
        Command::Riccati => run_riccati(config, &mut report)?,
        Command::Cf => run_cf(config, &mut report)?,
        Command::Price => run_price(config, &mut report)?,
        Command::HawkesSimulate => run_hawkes_simulate(config, &mut report)?,
        Command::HawkesValidate => run_hawkes_validate(config, &mut report)?,
        Command::LiftValidate => run_lift_validate(config, &mut report)?,
        Command::Stability => run_stability(config, &mut report)?,
        Command::Convergence => run_convergence(config, &mut report)?,
        Command::ModulusCheck => run_modulus_check(config, &mut report)?,
    }
    Ok(report)
}
