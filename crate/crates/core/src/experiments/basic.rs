use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::kernels::{resolvent_second_kind, KernelSpec};
use crate::model::{admissibility_residual, CharTriplet, InputCurve, JumpMeasure, ADMISSIBILITY_TOLERANCE};
use crate::riccati::{check_sign_condition, closed_form_exponent, solve_riccati, transform_exponent, Curve};
use crate::simulate::{ks_exponential, path_rng, simulate_hawkes_path, RealEstimate};
use crate::transforms::price_european_call;

use super::config::{Coefficients, RunConfig};
use super::report::{csv_table, ExperimentReport};

/// Solve one Riccati–Volterra equation and write `psi.csv`.
///
/// Defaults: `ψ = ∫K_0(t − s)(½ψ² − 1) ds` (fractional kernel with `H = 0`,
/// triplet `(0, 1, 0)`, `f0 = −1`) on `[0, 1]` with 1000 steps, input curve
/// `g0 ≡ 1`.
pub fn run_riccati(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let kernel = cfg.kernel.clone().unwrap_or(KernelSpec::fractional(0.0));
    let spec =
        cfg.riccati_spec_or(Coefficients { f0: Curve::real(-1.0), ..Default::default() }, CharTriplet::new(0.0, 1.0, JumpMeasure::None)?);
    spec.validate()?;
    kernel.validate()?;
    let curve = cfg.input_curve.clone().unwrap_or(InputCurve::constant(1.0));
    curve.validate()?;
    let grid = cfg.grid_or(1.0, 1000)?;
    let psi = solve_riccati(&spec, &kernel, &grid, &cfg.riccati)?;
    let mut buf = Vec::new();
    psi.write_csv(&mut buf)?;
    report.artifact("psi.csv", String::from_utf8(buf).expect("csv output is utf-8"));

    let case = "riccati";
    report.check_abs(case, "psi_0_abs", psi.values()[0].norm(), 0.0, 0.0);
    let sign = check_sign_condition(&spec, &grid);
    report.info(case, "sign_condition", if sign { 1.0 } else { 0.0 });
    match psi.blowup() {
        Some(k) => {
            // Legitimate when the sign condition fails, a defect otherwise.
            report.push(case, "blowup_node", k as f64, None, None, sign.then_some(false));
            return Ok(());
        }
        None => report.push(case, "blowup_node", -1.0, None, None, sign.then_some(true)),
    }
    let max_re = psi.max_re();
    report.push(case, "max_re_psi", max_re, Some(0.0), None, sign.then_some(max_re <= 1e-8));
    let quad = transform_exponent(&psi, &curve, &kernel)?;
    report.info(case, "exponent_re", quad.re);
    report.info(case, "exponent_im", quad.im);
    if let Some(closed) = closed_form_exponent(&psi, &curve, &kernel)? {
        let rel = (closed - quad).norm() / closed.norm().max(1e-300);
        report.push(case, "closed_form_rel_diff", rel, Some(0.0), None, Some(rel <= 1e-8 || (closed - quad).norm() <= 1e-14));
    }
    for h in cfg.experiment.h_sequence.clone().unwrap_or(vec![0.01, 0.1, 0.5]) {
        let r = admissibility_residual(&curve, &kernel, h, &grid)?;
        report.check(&format!("admissibility_h={h}"), "min_residual", r.min_value(), r.min_value() >= ADMISSIBILITY_TOLERANCE);
    }
    Ok(())
}

/// Characteristic function sweep of `log S_T`, written to `cf.csv`.
///
/// Defaults: classical Heston (`K ≡ 1`), `v ∈ {−10, −9.5, …, 10}`, `T = 1`
/// with 1024 steps.
pub fn run_cf(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let model = cfg.heston_or(KernelSpec::constant(1.0), JumpMeasure::None)?;
    let grid = cfg.grid_or(1.0, 1024)?;
    let args = cfg.experiment.args.clone().unwrap_or_else(|| (0..=40).map(|k| -10.0 + 0.5 * k as f64).collect());
    let values: Vec<Complex64> = args.par_iter().map(|&v| model.cf_logprice(v, &grid, &cfg.riccati)).collect::<Result<_>>()?;
    report.artifact("cf.csv", csv_table(&["arg", "re", "im"], args.iter().zip(&values).map(|(v, z)| vec![*v, z.re, z.im]))?);

    let case = "cf";
    let max_mod = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    report.check(case, "max_modulus", max_mod, max_mod <= 1.0 + 1e-12);
    // Hermitian symmetry over the pairs present in the sweep.
    let mut asym: f64 = 0.0;
    let mut pairs = 0;
    for (i, v) in args.iter().enumerate() {
        if let Some(j) = args.iter().position(|w| *w == -v) {
            asym = asym.max((values[i] - values[j].conj()).norm());
            pairs += 1;
        }
    }
    if pairs > 0 {
        report.check_abs(case, "hermitian_asymmetry", asym, 0.0, 1e-12);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mart = model.joint_transform(zero, Complex64::new(1.0, 0.0), &grid, &cfg.riccati)?;
    report.check_abs(case, "martingale_re", mart.re / model.s0, 1.0, 1e-12);
    report.check_abs(case, "martingale_im", mart.im / model.s0, 0.0, 1e-12);
    Ok(())
}

/// European call prices by Fourier inversion, written to `prices.csv`.
///
/// Defaults: classical Heston with `T = 1` on 512 steps and strikes
/// `{0.5, 0.8, 0.9, 1, 1.1, 1.2, 1.5}`.
pub fn run_price(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let model = cfg.heston_or(KernelSpec::constant(1.0), JumpMeasure::None)?;
    let grid = cfg.grid_or(1.0, 512)?;
    let mut strikes = cfg.experiment.strikes.clone().unwrap_or(vec![0.5, 0.8, 0.9, 1.0, 1.1, 1.2, 1.5]);
    strikes.sort_by(f64::total_cmp);
    let prices: Vec<f64> = strikes.iter().map(|&k| price_european_call(&model, k, &grid, &cfg.pricing)).collect::<Result<_>>()?;
    report.artifact("prices.csv", csv_table(&["strike", "price"], strikes.iter().zip(&prices).map(|(k, p)| vec![*k, *p]))?);

    let s0 = model.s0;
    let tol = 1e-8 * s0;
    for (k, p) in strikes.iter().zip(&prices) {
        let lower = (s0 - k).max(0.0);
        report.check(&format!("strike={k}"), "call", *p, *p >= lower - tol && *p <= s0 + tol);
    }
    let decreasing = prices.windows(2).all(|w| w[1] <= w[0] + tol);
    report.check("prices", "decreasing_in_strike", if decreasing { 1.0 } else { 0.0 }, decreasing);
    let convex = (2..prices.len()).all(|i| {
        let (k0, k1, k2) = (strikes[i - 2], strikes[i - 1], strikes[i]);
        let w = (k2 - k1) / (k2 - k0);
        prices[i - 1] <= w * prices[i - 2] + (1.0 - w) * prices[i] + tol
    });
    report.check("prices", "convex_in_strike", if convex { 1.0 } else { 0.0 }, convex);
    Ok(())
}

/// Simulate a Hawkes population; path 0 goes to `events.txt`, counts to
/// `counts.csv`.
///
/// Defaults: `K(t) = 0.5 e^{−t}`, `g0 ≡ 1`, `T = 2`, 10⁴ paths. The mean count
/// is checked against `E[N_T] = ∫_0^T (g0 + R * g0)` from the second-kind
/// resolvent; for a zero kernel the inter-event times of path 0 are tested
/// against the exponential law.
pub fn run_hawkes_simulate(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let kernel = cfg.kernel.clone().unwrap_or(KernelSpec::exp_sum(&[(0.5, 1.0)]));
    let g0 = cfg.input_curve.clone().unwrap_or(InputCurve::constant(1.0));
    let grid = cfg.grid_or(2.0, 2000)?;
    let horizon = grid.horizon();
    let n_paths = cfg.paths_or(10_000);
    let seed = report.seed;
    let events: Vec<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| simulate_hawkes_path(&g0, &kernel, horizon, &mut path_rng(seed, p)))
        .collect::<Result<_>>()?;
    let mut txt = String::new();
    for t in events.first().map(|e| e.as_slice()).unwrap_or(&[]) {
        txt.push_str(&crate::sampled::fmt_f64(*t));
        txt.push('\n');
    }
    report.artifact("events.txt", txt);
    let counts: Vec<f64> = events.iter().map(|e| e.len() as f64).collect();
    report.artifact("counts.csv", csv_table(&["path", "count"], counts.iter().enumerate().map(|(i, c)| vec![i as f64, *c]))?);

    let mean = RealEstimate::from_samples(&counts);
    let r = resolvent_second_kind(&kernel, &grid)?;
    let cells = r.cell_integrals();
    let dt = grid.dt();
    // E[λ(t_k)] = g0(t_k) + Σ_j ∫_{cell j} R(t_k − s) g0(s) ds, cells taken backwards from t_k.
    let intensity: Vec<f64> = (0..grid.len())
        .map(|k| {
            let conv: f64 = (0..k).map(|j| cells[j] * g0.g0(&kernel, grid.node(k) - (j as f64 + 0.5) * dt)).sum();
            g0.g0(&kernel, grid.node(k)) + conv
        })
        .collect();
    let expected = crate::numeric::trapezoid(&intensity, dt);
    report.check_se("population", "mean_count", mean.mean, expected, mean.se, 3.0);
    if kernel.integral(horizon) == 0.0 {
        if let Some(first) = events.first() {
            let mut gaps: Vec<f64> = Vec::with_capacity(first.len());
            let mut prev = 0.0;
            for &t in first {
                gaps.push(t - prev);
                prev = t;
            }
            let rate = g0.g0(&kernel, 0.0);
            if gaps.len() >= 2 && g0.g0(&kernel, horizon) == rate {
                let ks = ks_exponential(&gaps, rate);
                report.push("path_0", "ks_statistic", ks.statistic, Some(ks.critical), None, Some(ks.pass));
            }
        }
    }
    Ok(())
}
