use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{l1_distance, ExpTerm, KernelSpec};
use crate::numeric::gamma;

/// Exponential-sum approximation of a fractional kernel.
#[derive(Clone, Debug, Serialize)]
pub struct ExpSumFit {
    pub kernel: KernelSpec,
    /// Geometric ratio of the rate partition.
    pub ratio: f64,
    /// `∫_0^T |K_H − K_fit|`.
    pub l1_error: f64,
}

/// Terms for the partition `η_i = r^{i − n/2}`, `i = 0..=n`, of the
/// spectral measure `μ(dγ) = γ^{−α} dγ / (Γ(α)Γ(1−α))` of `K_H`:
/// weight `∫μ` and rate `∫γμ / ∫μ` on each piece.
fn partition_terms(alpha: f64, n: usize, r: f64) -> Vec<ExpTerm> {
    let norm = gamma(alpha) * gamma(1.0 - alpha);
    let eta = |i: usize| r.powf(i as f64 - n as f64 / 2.0);
    (0..n)
        .map(|i| {
            let (a, b) = (eta(i), eta(i + 1));
            let w = (b.powf(1.0 - alpha) - a.powf(1.0 - alpha)) / ((1.0 - alpha) * norm);
            let m = (b.powf(2.0 - alpha) - a.powf(2.0 - alpha)) / ((2.0 - alpha) * norm);
            ExpTerm::new(w, m / w)
        })
        .collect()
}

/// Fit `n_factors` exponentials to `Fractional{H}` on `[0, horizon]` by
/// searching the partition ratio that minimizes the L¹ distance, subject to
/// every rate staying at or below `max_rate`.
pub fn fit_fractional_exp_sum(hurst: f64, n_factors: usize, horizon: f64, max_rate: f64) -> Result<ExpSumFit> {
    let target = KernelSpec::fractional(hurst);
    target.validate()?;
    let alpha = hurst + 0.5;
    if alpha >= 1.0 {
        return Err(Error::InvalidParameter("H = 1/2 is already a single constant factor".into()));
    }
    if n_factors == 0 {
        return Err(Error::InvalidParameter("need at least one factor".into()));
    }
    let grid = Grid::new(horizon, 200)?;
    let mut best: Option<ExpSumFit> = None;
    for i in 0..=400 {
        let r = (1.02f64.ln() + (1000f64.ln() - 1.02f64.ln()) * i as f64 / 400.0).exp();
        let terms = partition_terms(alpha, n_factors, r);
        if terms.iter().any(|t| !(t.rate <= max_rate) || !t.weight.is_finite()) {
            continue;
        }
        let kernel = KernelSpec::ExpSum { terms };
        let l1_error = l1_distance(&target, &kernel, &grid);
        if best.as_ref().is_none_or(|b| l1_error < b.l1_error) {
            best = Some(ExpSumFit { kernel, ratio: r, l1_error });
        }
    }
    best.ok_or_else(|| Error::InvalidParameter(format!("no partition keeps every rate below {max_rate}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_weights_sum_to_the_measure_of_the_covered_range() {
        let alpha = 0.6;
        let r: f64 = 4.0;
        let terms = partition_terms(alpha, 4, r);
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        let norm = gamma(alpha) * gamma(1.0 - alpha);
        let exact = (r.powf(2.0 * (1.0 - alpha)) - r.powf(-2.0 * (1.0 - alpha))) / ((1.0 - alpha) * norm);
        assert!((total - exact).abs() < 1e-12);
        for (i, t) in terms.iter().enumerate() {
            let lo = r.powf(i as f64 - 2.0);
            assert!(t.rate > lo && t.rate < lo * r);
        }
    }

    #[test]
    fn more_factors_fit_better_and_rates_respect_the_cap() {
        let f3 = fit_fractional_exp_sum(0.1, 3, 1.0, 50.0).unwrap();
        let f6 = fit_fractional_exp_sum(0.1, 6, 1.0, 200.0).unwrap();
        assert!(f6.l1_error < f3.l1_error);
        let KernelSpec::ExpSum { terms } = &f3.kernel else { panic!() };
        assert_eq!(terms.len(), 3);
        assert!(terms.iter().all(|t| t.rate <= 50.0));
        // Recomputing the objective independently reproduces it.
        let d = l1_distance(&KernelSpec::fractional(0.1), &f3.kernel, &Grid::new(1.0, 200).unwrap());
        assert_eq!(d, f3.l1_error);
        assert!(f3.l1_error < 0.5 * KernelSpec::fractional(0.1).integral(1.0));
    }
}
