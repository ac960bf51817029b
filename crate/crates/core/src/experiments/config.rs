use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, InputCurve, JumpMeasure};
use crate::riccati::{Curve, RiccatiSpec, SolverOptions};
use crate::transforms::{HestonModel, PricingOptions};

/// Subcommands of the experiment runner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Riccati,
    Cf,
    Price,
    HawkesSimulate,
    HawkesValidate,
    LiftValidate,
    Stability,
    Convergence,
    ModulusCheck,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Riccati,
        Command::Cf,
        Command::Price,
        Command::HawkesSimulate,
        Command::HawkesValidate,
        Command::LiftValidate,
        Command::Stability,
        Command::Convergence,
        Command::ModulusCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Riccati => "riccati",
            Command::Cf => "cf",
            Command::Price => "price",
            Command::HawkesSimulate => "hawkes-simulate",
            Command::HawkesValidate => "hawkes-validate",
            Command::LiftValidate => "lift-validate",
            Command::Stability => "stability",
            Command::Convergence => "convergence",
            Command::ModulusCheck => "modulus-check",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub horizon: f64,
    pub n_steps: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.horizon, self.n_steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HestonParams {
    pub s0: f64,
    pub rho: f64,
}

/// Coefficient curves of a Riccati run; missing curves are zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Coefficients {
    pub f0: Curve,
    pub f1: Curve,
    pub f2: Curve,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Overridden by `--seed`.
    pub seed: Option<u64>,
    pub n_paths: Option<usize>,
    /// Number of leading paths written to `paths.csv` (lift commands).
    pub dump_paths: usize,
}

/// Approximating family for the stability harness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `K^n = K(· + 1/n)`.
    #[default]
    Shifted,
    /// `n`-factor exponential sums fitted in L¹ (fractional bases only).
    ExpSum,
}

/// Parameters of the Hawkes scaling experiment: `φ_n(t) = c e^{−(c + λ/n)t}`,
/// `g0 ≡ μ`, observed on `[0, nT]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub enabled: bool,
    pub mu: f64,
    pub c: f64,
    pub lambda: f64,
    pub horizon: f64,
    pub n_paths: usize,
    /// Riccati steps per unit of original time.
    pub steps_per_unit: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { enabled: true, mu: 1.0, c: 1.0, lambda: 1.0, horizon: 1.0, n_paths: 20_000, steps_per_unit: 50 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Approximation indices (stability) or rescaling factors (Hawkes scaling).
    pub n_sequence: Option<Vec<usize>>,
    /// Window sizes of the modulus check.
    pub delta_sequence: Option<Vec<f64>>,
    /// Shifts of the admissibility check.
    pub h_sequence: Option<Vec<f64>>,
    /// Step counts of the convergence study, coarse to fine.
    pub grid_sequence: Option<Vec<usize>>,
    /// Transform arguments: `v` for characteristic functions, `a` for
    /// `E[e^{iaN_T}]` or `E[e^{iaX_T}]`.
    pub args: Option<Vec<f64>>,
    pub strikes: Option<Vec<f64>>,
    pub family: Family,
    /// Exponential factors when a fractional kernel is lifted.
    pub factors: Option<usize>,
    /// Euler steps of the lift simulation.
    pub sim_steps: Option<usize>,
    pub scaling: ScalingConfig,
}

/// A complete run description. Every section is optional; each command
/// documents its defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub kernel: Option<KernelSpec>,
    pub triplet: Option<CharTriplet>,
    pub input_curve: Option<InputCurve>,
    pub heston: Option<HestonParams>,
    pub coefficients: Option<Coefficients>,
    pub grid: Option<GridConfig>,
    pub riccati: SolverOptions,
    pub pricing: PricingOptions,
    pub simulation: SimulationConfig,
    pub experiment: ExperimentConfig,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Parse JSON; errors carry the line and column of the first problem.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.simulation.seed.unwrap_or(DEFAULT_SEED)
    }

    pub(crate) fn grid_or(&self, horizon: f64, n_steps: usize) -> Result<Grid> {
        self.grid.unwrap_or(GridConfig { horizon, n_steps }).build()
    }

    pub(crate) fn paths_or(&self, n: usize) -> usize {
        self.simulation.n_paths.unwrap_or(n)
    }

    /// Heston model from the config, defaulting to the classical parameter
    /// set `(b, c, ρ, x0, θ) = (−2, 0.09, −0.7, 0.04, 0.08)` with `S0 = 1`.
    pub(crate) fn heston_or(&self, kernel: KernelSpec, nu: JumpMeasure) -> Result<HestonModel> {
        let p = self.heston.unwrap_or(HestonParams { s0: 1.0, rho: -0.7 });
        let triplet = match &self.triplet {
            Some(t) => t.clone(),
            None => CharTriplet::new(-2.0, 0.09, nu)?,
        };
        let m = HestonModel {
            s0: p.s0,
            rho: p.rho,
            kernel: self.kernel.clone().unwrap_or(kernel),
            curve: self.input_curve.clone().unwrap_or(InputCurve::AffineInK { x0: 0.04, theta: 0.08 }),
            triplet,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn riccati_spec_or(&self, default: Coefficients, triplet: CharTriplet) -> RiccatiSpec {
        let c = self.coefficients.clone().unwrap_or(default);
        RiccatiSpec::new(c.f0, c.f1, c.f2, self.triplet.clone().unwrap_or(triplet))
    }
}

pub const DEFAULT_SEED: u64 = 1;
