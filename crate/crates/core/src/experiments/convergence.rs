use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, JumpMeasure};
use crate::riccati::{solve_riccati, Curve, RiccatiSpec, SolverOptions};
use crate::transforms::HestonModel;

use super::config::{Coefficients, RunConfig};
use super::report::{labeled_csv_table, ExperimentReport};

/// Max-node errors of `solve_riccati` on each grid against a reference with
/// four times the finest resolution, compared on the coarsest nodes.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
}

impl ConvergenceStudy {
    /// `log(e_i / e_{i+1}) / log(n_{i+1} / n_i)`.
    pub fn orders(&self) -> Vec<f64> {
        (1..self.errors.len())
            .map(|i| (self.errors[i - 1] / self.errors[i]).ln() / (self.steps[i] as f64 / self.steps[i - 1] as f64).ln())
            .collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// `exact`, if given, replaces the refined reference.
pub fn convergence_study(
    spec: &RiccatiSpec,
    kernel: &KernelSpec,
    horizon: f64,
    steps: &[usize],
    opts: &SolverOptions,
    exact: Option<&(dyn Fn(f64) -> Complex64 + Sync)>,
) -> Result<ConvergenceStudy> {
    let coarse = *steps.iter().min().expect("at least one grid");
    let finest = *steps.iter().max().expect("at least one grid");
    let reference: Box<dyn Fn(f64) -> Complex64 + Sync> = match exact {
        Some(f) => Box::new(f),
        None => {
            let g = Grid::new(horizon, 4 * finest)?;
            let p = solve_riccati(spec, kernel, &g, opts)?;
            p.ensure_finite()?;
            let values = p.values().to_vec();
            let stride = 4 * finest / coarse;
            Box::new(move |t: f64| values[(t / horizon * coarse as f64).round() as usize * stride])
        }
    };
    let errors = steps
        .par_iter()
        .map(|&n| {
            let g = Grid::new(horizon, n)?;
            let p = solve_riccati(spec, kernel, &g, opts)?;
            p.ensure_finite()?;
            let stride = n / coarse;
            Ok((0..=coarse).map(|k| (p.values()[k * stride] - reference(g.node(k * stride))).norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceStudy { steps: steps.to_vec(), errors })
}

/// Empirical orders of the Riccati solver.
///
/// Defaults: grids with `{64, …, 1024}` steps on `[0, 1]` and three cases:
/// a linear equation with an exact quadrature (`K ≡ 1`, `F ≡ 1`), classical
/// Heston at `v = 1` (half-step error ratios at least 1.6), and
/// `ψ = ∫K_0(t − s)(½ψ² − 1) ds` (positive orders). A custom kernel or
/// coefficient set in the config replaces the three cases by one.
pub fn run_convergence(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let mut steps = cfg.experiment.grid_sequence.clone().unwrap_or(vec![64, 128, 256, 512, 1024]);
    steps.sort_unstable();
    let coarse = steps[0];
    if steps.iter().any(|s| s % coarse != 0) {
        return Err(crate::error::Error::InvalidGrid("grid_sequence must be multiples of its smallest entry".into()));
    }
    let horizon = cfg.grid.map(|g| g.horizon).unwrap_or(1.0);
    let custom = cfg.kernel.is_some() || cfg.coefficients.is_some();
    let mut cases: Vec<(String, RiccatiSpec, KernelSpec)> = Vec::new();
    if custom {
        let spec = cfg
            .riccati_spec_or(Coefficients { f0: Curve::real(-1.0), ..Default::default() }, CharTriplet::new(0.0, 1.0, JumpMeasure::None)?);
        cases.push(("custom".into(), spec, cfg.kernel.clone().unwrap_or(KernelSpec::fractional(0.0))));
    } else {
        let none = CharTriplet::new(0.0, 0.0, JumpMeasure::None)?;
        cases.push(("linear".into(), RiccatiSpec::new(Curve::real(1.0), Curve::zero(), Curve::zero(), none), KernelSpec::constant(1.0)));
        let heston = HestonModel {
            s0: 1.0,
            rho: -0.7,
            kernel: KernelSpec::constant(1.0),
            curve: crate::model::InputCurve::AffineInK { x0: 0.04, theta: 0.08 },
            triplet: CharTriplet::new(-2.0, 0.09, JumpMeasure::None)?,
        };
        let spec = heston.riccati_spec(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0))?;
        cases.push(("classical_heston".into(), spec, KernelSpec::constant(1.0)));
        let spec = RiccatiSpec::new(Curve::real(-1.0), Curve::zero(), Curve::zero(), CharTriplet::new(0.0, 1.0, JumpMeasure::None)?);
        cases.push(("fractional_h=0".into(), spec, KernelSpec::fractional(0.0)));
    }
    let mut table = Vec::new();
    for (case, spec, kernel) in &cases {
        let linear = case == "linear";
        let exact = |t: f64| Complex64::new(t, 0.0);
        let study = convergence_study(spec, kernel, horizon, &steps, &cfg.riccati, linear.then_some(&exact as _))?;
        for (n, e) in study.steps.iter().zip(&study.errors) {
            report.info(&format!("{case}_n={n}"), "max_error", *e);
            table.push((case.clone(), vec![*n as f64, *e]));
        }
        for (n, o) in study.steps[1..].iter().zip(study.orders()).filter(|(_, o)| o.is_finite()) {
            report.info(&format!("{case}_n={n}"), "order", o);
        }
        let worst = study.errors.iter().copied().fold(0.0, f64::max);
        if linear {
            report.check_abs(case, "max_error", worst, 0.0, 1e-12);
        } else if !kernel.is_singular_at_zero() {
            let min_ratio = study.ratios().into_iter().fold(f64::INFINITY, f64::min);
            report.check(case, "min_halving_ratio", min_ratio, min_ratio >= 1.6);
        } else {
            let min_order = study.orders().into_iter().fold(f64::INFINITY, f64::min);
            report.check(case, "min_order", min_order, min_order > 0.0);
        }
    }
    report.artifact("convergence.csv", labeled_csv_table(&["case", "n_steps", "max_error"], table)?);
    Ok(())
}
