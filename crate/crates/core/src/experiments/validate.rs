use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{fit_fractional_exp_sum, KernelSpec};
use crate::model::{CharTriplet, InputCurve, JumpMeasure};
use crate::riccati::{Curve, RiccatiSpec};
use crate::simulate::{
    g0_left_sums, map_lift_paths, modulus_bound_check, path_moduli, path_rng, rescaled_integrated_intensity, simulate_hawkes_path,
    ComplexEstimate, LiftPath, RealEstimate,
};
use crate::transforms::{hawkes_transform, solve_transform, HestonModel};

use super::config::RunConfig;
use super::report::{csv_table, ExperimentReport};

fn push_complex(report: &mut ExperimentReport, case: &str, mc: &ComplexEstimate, exact: Complex64) {
    report.check_se(case, "re", mc.mean.re, exact.re, mc.se_re, 3.0);
    report.check_se(case, "im", mc.mean.im, exact.im, mc.se_im, 3.0);
}

/// Monte Carlo against the Hawkes Riccati formula.
///
/// Defaults: `K(t) = 0.5 e^{−t}`, `g0 ≡ 1`, `T = 2` (2000 Riccati steps),
/// `a ∈ {0.5, 1}`, 10⁵ paths. Cases: `E[e^{iaN_T}]` for each `a`,
/// `E[e^{−∫_0^T λ}]`, and the scaling experiment.
pub fn run_hawkes_validate(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let kernel = cfg.kernel.clone().unwrap_or(KernelSpec::exp_sum(&[(0.5, 1.0)]));
    let g0 = cfg.input_curve.clone().unwrap_or(InputCurve::constant(1.0));
    let grid = cfg.grid_or(2.0, 2000)?;
    let horizon = grid.horizon();
    let n_paths = cfg.paths_or(100_000);
    let seed = report.seed;
    let one_step = Grid::new(horizon, 1)?;
    // (N_T, ∫_0^T λ) per path.
    let samples: Vec<(f64, f64)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let ev = simulate_hawkes_path(&g0, &kernel, horizon, &mut path_rng(seed, p))?;
            let x = rescaled_integrated_intensity(&ev, 1, &g0, &kernel, &one_step).values[1];
            Ok((ev.len() as f64, x))
        })
        .collect::<Result<_>>()?;
    let zero = Curve::zero();
    for a in cfg.experiment.args.clone().unwrap_or(vec![0.5, 1.0]) {
        let exact = hawkes_transform(&zero, &Curve::imag(a), &g0, &kernel, &grid, &cfg.riccati)?;
        let z: Vec<Complex64> = samples.iter().map(|(n, _)| Complex64::new(0.0, a * n).exp()).collect();
        push_complex(report, &format!("counts_a={a}"), &ComplexEstimate::from_samples(&z), exact);
    }
    let exact = hawkes_transform(&Curve::real(-1.0), &zero, &g0, &kernel, &grid, &cfg.riccati)?;
    let e: Vec<f64> = samples.iter().map(|(_, x)| (-x).exp()).collect();
    let est = RealEstimate::from_samples(&e);
    report.check_se("laplace_integrated_intensity", "re", est.mean, exact.re, est.se, 3.0);
    if cfg.experiment.scaling.enabled {
        hawkes_scaling(cfg, report)?;
    }
    Ok(())
}

/// Nearly critical Hawkes processes `φ_n(t) = c e^{−(c + λ/n)t}`, `g0 ≡ μ`:
/// `X^n_T = n^{−2} ∫_0^{nT} λ^n` converges to the integral of a square-root
/// process `Y = ∫ c e^{−λ(t−s)} (μ ds + dM_s)`, `d⟨M⟩ = Y dt`.
///
/// Checks that the exact finite-`n` values of `E[e^{−X^n_T}]` approach the
/// limit with strictly decreasing error, and that Monte Carlo matches each
/// finite-`n` value.
fn hawkes_scaling(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let sc = cfg.experiment.scaling;
    let ns = cfg.experiment.n_sequence.clone().unwrap_or(vec![4, 16, 64]);
    let steps = |h: f64| ((h * sc.steps_per_unit as f64).round() as usize).max(1);
    let limit_spec = RiccatiSpec::new(Curve::real(-1.0), Curve::zero(), Curve::zero(), CharTriplet::new(0.0, 1.0, JumpMeasure::None)?);
    let limit_kernel = KernelSpec::exp_sum(&[(sc.c, sc.lambda)]);
    let limit_curve = InputCurve::AffineInK { x0: 0.0, theta: sc.mu };
    let limit_grid = Grid::new(sc.horizon, steps(sc.horizon).max(2000))?;
    let limit = solve_transform(&limit_spec, &limit_kernel, &limit_curve, &limit_grid, &cfg.riccati)?.value().re;
    report.info("scaling_limit", "laplace", limit);
    let g0 = InputCurve::constant(sc.mu);
    let seed = report.seed;
    let mut errors = Vec::new();
    for &n in &ns {
        let nf = n as f64;
        let kernel = KernelSpec::exp_sum(&[(sc.c, sc.c + sc.lambda / nf)]);
        let horizon = nf * sc.horizon;
        let grid = Grid::new(horizon, steps(horizon))?;
        let exact = hawkes_transform(&Curve::real(-1.0 / (nf * nf)), &Curve::zero(), &g0, &kernel, &grid, &cfg.riccati)?.re;
        let one_step = Grid::new(sc.horizon, 1)?;
        let samples: Vec<f64> = (0..sc.n_paths as u64)
            .into_par_iter()
            .map(|p| {
                let ev = simulate_hawkes_path(&g0, &kernel, horizon, &mut path_rng(seed ^ ((n as u64) << 32), p))?;
                Ok((-rescaled_integrated_intensity(&ev, n, &g0, &kernel, &one_step).values[1] / nf).exp())
            })
            .collect::<Result<_>>()?;
        let mc = RealEstimate::from_samples(&samples);
        let case = format!("scaling_n={n}");
        report.check_se(&case, "mc_vs_exact", mc.mean, exact, mc.se, 3.0);
        report.push(&case, "mc_vs_limit", mc.mean, Some(limit), Some(mc.se), None);
        report.push(&case, "exact_vs_limit", exact, Some(limit), None, None);
        errors.push((exact - limit).abs());
    }
    let decreasing = super::stability::strictly_decreasing(&errors);
    report.check("scaling", "errors_strictly_decreasing", errors.last().copied().unwrap_or(0.0), decreasing);
    Ok(())
}

/// Lift model and grids shared by `lift-validate` and `modulus-check`.
///
/// Defaults: `H = 0.1` fractional kernel fitted by 3 exponentials with rates
/// below `0.1/Δt`, classical Heston coefficients with exponential jumps
/// (`ν(dζ) = 4e^{−4ζ}dζ`, unit mass), `T = 1`, 500 Euler steps and 2000
/// Riccati steps.
pub(crate) fn lift_setup(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<(HestonModel, Grid, Grid)> {
    let mut model = cfg.heston_or(KernelSpec::fractional(0.1), JumpMeasure::Exponential { mass: 1.0, rate: 4.0 })?;
    let formula_grid = cfg.grid_or(1.0, 2000)?;
    let sim_grid = Grid::new(formula_grid.horizon(), cfg.experiment.sim_steps.unwrap_or(500))?;
    if let KernelSpec::Fractional { hurst } = model.kernel {
        let factors = cfg.experiment.factors.unwrap_or(3);
        let fit = fit_fractional_exp_sum(hurst, factors, sim_grid.horizon(), 0.1 / sim_grid.dt())?;
        report.info("kernel_fit", "l1_error", fit.l1_error);
        report.info("kernel_fit", "ratio", fit.ratio);
        model.kernel = fit.kernel;
    }
    if !matches!(model.kernel, KernelSpec::ExpSum { .. }) {
        return Err(Error::UnsupportedKernel("lift commands need a fractional or exponential-sum kernel".into()));
    }
    Ok((model, sim_grid, formula_grid))
}

fn dump_paths(cfg: &RunConfig, model: &HestonModel, grid: &Grid, report: &mut ExperimentReport) -> Result<()> {
    let n = cfg.simulation.dump_paths;
    if n == 0 {
        return Ok(());
    }
    let (paths, _) = map_lift_paths(model, grid, report.seed, n, |p: &LiftPath| p.clone())?;
    let rows = paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| grid.nodes().enumerate().map(move |(k, t)| vec![i as f64, t, p.bundle.x[k], p.y[k], p.log_s[k]]));
    report.artifact("paths.csv", csv_table(&["path", "t", "x", "y", "log_s"], rows)?);
    Ok(())
}

/// Euler Monte Carlo of the multifactor lift against `E[e^{iv log S_T}]`.
///
/// Defaults as in [`lift_setup`], `v ∈ {1, 2}`, 10⁵ paths.
pub fn run_lift_validate(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let (model, sim_grid, formula_grid) = lift_setup(cfg, report)?;
    let args = cfg.experiment.args.clone().unwrap_or(vec![1.0, 2.0]);
    let n_paths = cfg.paths_or(100_000);
    let (samples, diag) = map_lift_paths(&model, &sim_grid, report.seed, n_paths, |p| (p.log_s[p.log_s.len() - 1], p.bundle.terminal_x()))?;
    report.info("lift", "truncation_rate", diag.truncation_rate());
    report.info("lift", "jump_rate_warnings", diag.jump_rate_warnings as f64);
    let mut rows = Vec::new();
    for &v in &args {
        let exact = model.cf_logprice(v, &formula_grid, &cfg.riccati)?;
        let z: Vec<Complex64> = samples.iter().map(|(ls, _)| Complex64::new(0.0, v * ls).exp()).collect();
        let mc = ComplexEstimate::from_samples(&z);
        push_complex(report, &format!("cf_v={v}"), &mc, exact);
        rows.push(vec![v, mc.mean.re, mc.mean.im, mc.se_re, mc.se_im, exact.re, exact.im]);
    }
    report.artifact("lift.csv", csv_table(&["arg", "re_mc", "im_mc", "se_re", "se_im", "re_formula", "im_formula"], rows)?);
    // X is non-decreasing, so sup_t X_t² = X_T².
    let sq: Vec<f64> = samples.iter().map(|(_, x)| x * x).collect();
    let full = RealEstimate::from_samples(&sq);
    let half = RealEstimate::from_samples(&sq[..sq.len() / 2]);
    let stable = full.mean.is_finite() && (full.mean - half.mean).abs() <= 3.0 * half.se;
    report.push("moments", "sup_x_squared", full.mean, Some(half.mean), Some(half.se), Some(stable));
    dump_paths(cfg, &model, &sim_grid, report)
}

/// Empirical modulus of continuity of `X − G_0` against its moment bound.
///
/// The Euler `X` is centred on the same scheme's left-point `G_0`, so that a
/// deterministic model has a vanishing modulus, as its bound does.
///
/// Defaults as in [`lift_setup`], `δ ∈ {0.1, 0.05, 0.025}`, 10⁵ paths.
pub fn run_modulus_check(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let (model, sim_grid, _) = lift_setup(cfg, report)?;
    let mut deltas = cfg.experiment.delta_sequence.clone().unwrap_or(vec![0.1, 0.05, 0.025]);
    deltas.sort_by(|a, b| b.total_cmp(a));
    let n_paths = cfg.paths_or(100_000);
    let g0 = g0_left_sums(&model.curve, &model.kernel, &sim_grid);
    let (samples, _) =
        map_lift_paths(&model, &sim_grid, report.seed, n_paths, |p| (path_moduli(&p.bundle, &g0, &deltas), p.bundle.terminal_x()))?;
    let xt: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut rhs = Vec::new();
    let mut rows = Vec::new();
    for (i, &d) in deltas.iter().enumerate() {
        let w: Vec<f64> = samples.iter().map(|s| s.0[i]).collect();
        let c = modulus_bound_check(&w, &xt, &model.triplet, &model.kernel, d, sim_grid.horizon());
        report.push(&format!("delta={d}"), "lhs_le_rhs", c.lhs.mean, Some(c.rhs), Some(c.lhs.se), Some(c.pass));
        rhs.push(c.rhs);
        rows.push(vec![d, c.lhs.mean, c.lhs.se, c.rhs]);
    }
    report.artifact("modulus.csv", csv_table(&["delta", "lhs", "lhs_se", "rhs"], rows)?);
    let decreasing = super::stability::strictly_decreasing(&rhs);
    report.check("modulus", "rhs_decreasing_in_delta", rhs.last().copied().unwrap_or(0.0), decreasing);
    dump_paths(cfg, &model, &sim_grid, report)
}
