use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{fit_fractional_exp_sum, l1_distance, resolvent_second_kind, KernelSpec};
use crate::model::{CharTriplet, InputCurve, JumpMeasure};
use crate::riccati::{Curve, RiccatiSpec, SolverOptions};
use crate::transforms::solve_transform;

use super::config::{Family, RunConfig};
use super::report::{labeled_csv_table, ExperimentReport};

/// Strictly decreasing, except that a run of exact zeros also counts.
pub(crate) fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

/// One member of the approximating family.
pub fn approximant(base: &KernelSpec, family: Family, n: usize, horizon: f64) -> Result<KernelSpec> {
    match family {
        Family::Shifted => Ok(KernelSpec::shifted(base.clone(), 1.0 / n as f64)),
        Family::ExpSum => match base {
            KernelSpec::Fractional { hurst } => Ok(fit_fractional_exp_sum(*hurst, n, horizon, f64::INFINITY)?.kernel),
            _ => Err(Error::UnsupportedKernel("exponential-sum fits need a fractional base kernel".into())),
        },
    }
}

/// Distances and transform value for one approximant.
#[derive(Clone, Debug)]
pub struct StabilityRow {
    pub n: usize,
    pub kernel_l1: f64,
    pub resolvent_l1: f64,
    pub g0_sup: f64,
    pub transform: Complex64,
}

fn cell_l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Evaluate `E[e^{iaX_T}]` under each approximant `K^n` and its distances to `K`.
#[allow(clippy::too_many_arguments)]
pub fn stability_rows(
    base: &KernelSpec,
    family: Family,
    ns: &[usize],
    a: f64,
    triplet: &CharTriplet,
    curve: &InputCurve,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<(Complex64, Vec<StabilityRow>)> {
    let spec = RiccatiSpec::new(Curve::imag(a), Curve::zero(), Curve::zero(), triplet.clone());
    let limit = solve_transform(&spec, base, curve, grid, opts)?.value();
    let r_base = resolvent_second_kind(base, grid)?.cell_integrals();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let k = approximant(base, family, n, grid.horizon())?;
            let r = resolvent_second_kind(&k, grid)?.cell_integrals();
            let g0_sup = grid.nodes().map(|t| (curve.G0(&k, t) - curve.G0(base, t)).abs()).fold(0.0, f64::max);
            Ok(StabilityRow {
                n,
                kernel_l1: l1_distance(&k, base, grid),
                resolvent_l1: cell_l1(&r, &r_base),
                g0_sup,
                transform: solve_transform(&spec, &k, curve, grid, opts)?.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((limit, rows))
}

/// Stability harness over `n ∈ n_sequence`.
///
/// Defaults: shifted family `K(· + 1/n)`, `n ∈ {4, 16, 64}`, `a = 1`,
/// triplet `(−0.5, 0.3, 0)`, `g0(t) = 0.5 + 0.5∫_0^t K`, `T = 1` with 1000 steps,
/// and two base kernels, `H = 0.1` and the hyper-rough `H = −0.2`. A base with
/// `H > 0` passes when the errors against the unshifted solution strictly
/// decrease; a base with `H ≤ 0` passes when successive differences strictly
/// decrease.
pub fn run_stability(cfg: &RunConfig, report: &mut ExperimentReport) -> Result<()> {
    let bases = match &cfg.kernel {
        Some(k) => vec![k.clone()],
        None => vec![KernelSpec::fractional(0.1), KernelSpec::fractional(-0.2)],
    };
    let family = cfg.experiment.family;
    let ns = cfg.experiment.n_sequence.clone().unwrap_or(match family {
        Family::Shifted => vec![4, 16, 64],
        Family::ExpSum => vec![2, 4, 8],
    });
    let a = cfg.experiment.args.as_ref().and_then(|v| v.first().copied()).unwrap_or(1.0);
    let triplet = cfg.triplet.clone().unwrap_or(CharTriplet::new(-0.5, 0.3, JumpMeasure::None)?);
    let curve = cfg.input_curve.clone().unwrap_or(InputCurve::AffineInK { x0: 0.5, theta: 0.5 });
    let grid = cfg.grid_or(1.0, 1000)?;
    let mut table = Vec::new();
    for (b, base) in bases.iter().enumerate() {
        base.validate()?;
        let (limit, rows) = stability_rows(base, family, &ns, a, &triplet, &curve, &grid, &cfg.riccati)?;
        let case = match base {
            KernelSpec::Fractional { hurst } => format!("fractional_h={hurst}"),
            _ => format!("kernel_{b}"),
        };
        report.info(&case, "limit_re", limit.re);
        report.info(&case, "limit_im", limit.im);
        let errors: Vec<f64> = rows.iter().map(|r| (r.transform - limit).norm()).collect();
        let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].transform - w[0].transform).norm()).collect();
        for (r, e) in rows.iter().zip(&errors) {
            let c = format!("{case}_n={}", r.n);
            report.info(&c, "kernel_l1", r.kernel_l1);
            report.info(&c, "resolvent_l1", r.resolvent_l1);
            report.info(&c, "g0_sup", r.g0_sup);
            report.info(&c, "transform_re", r.transform.re);
            report.info(&c, "transform_im", r.transform.im);
            report.info(&c, "error", *e);
            table.push((case.clone(), vec![r.n as f64, r.kernel_l1, r.resolvent_l1, r.g0_sup, r.transform.re, r.transform.im, *e]));
        }
        for (i, d) in diffs.iter().enumerate() {
            report.info(&format!("{case}_n={}", rows[i + 1].n), "cauchy_difference", *d);
        }
        let hyper_rough = matches!(base, KernelSpec::Fractional { hurst } if *hurst <= 0.0);
        if hyper_rough {
            let ok = strictly_decreasing(&diffs);
            report.check(&case, "cauchy_differences_decreasing", diffs.last().copied().unwrap_or(0.0), ok);
        } else {
            let ok = strictly_decreasing(&errors);
            report.check(&case, "errors_decreasing", errors.last().copied().unwrap_or(0.0), ok);
        }
    }
    report.artifact("stability.csv", labeled_csv_table(&["base", "n", "kernel_l1", "resolvent_l1", "g0_sup", "re", "im", "error"], table)?);
    Ok(())
}
