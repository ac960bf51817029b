use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numeric::gauss_legendre;
use crate::riccati::SolverOptions;
use crate::transforms::HestonModel;

/// Fourier inversion settings for European options.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PricingOptions {
    /// Real part `a` of the transform argument `h1 = a − iu`. Must lie in
    /// `(0, 1)`, where `E[S_T^a]` is finite for every model.
    pub contour: f64,
    /// Stop once a batch of panels contributes less than this, in price units.
    pub abs_tol: f64,
    /// Give up beyond this frequency.
    pub max_u: f64,
    /// Gauss–Legendre points per panel.
    pub points: usize,
    pub solver: SolverOptions,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions { contour: 0.5, abs_tol: 1e-10, max_u: 2000.0, points: 16, solver: SolverOptions::default() }
    }
}

const BATCH: usize = 8;

/// Call price `C = S0 − (K/π)(S0/K)^a ∫_0^∞ Re[e^{−iux} Φ(a − iu) / ((u + ia)² − i(u + ia))] du`,
/// where `x = ln(S0/K)` and `Φ(h) = E[(S_T/S_0)^h]`.
pub fn price_european_call(model: &HestonModel, strike: f64, grid: &Grid, opts: &PricingOptions) -> Result<f64> {
    model.validate()?;
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(Error::InvalidParameter(format!("strike must be positive, got {strike}")));
    }
    let a = opts.contour;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!("contour must lie in (0, 1), got {a}")));
    }
    let x = (model.s0 / strike).ln();
    let integrand = |u: f64| -> Result<f64> {
        let h1 = Complex64::new(a, -u);
        let phi = model.joint_exponent(Complex64::new(0.0, 0.0), h1, grid, &opts.solver)?.exp();
        let w = Complex64::new(u, a);
        let den = w * w - Complex64::i() * w;
        Ok((Complex64::new(0.0, -u * x).exp() * phi / den).re)
    };
    // Roughly half an oscillation of e^{−iux} per panel.
    let width = (std::f64::consts::PI / x.abs().max(1e-300)).min(1.0);
    let (nodes, weights) = gauss_legendre(opts.points);
    let mut integral = 0.0;
    let mut start = 0.0;
    loop {
        if start >= opts.max_u {
            return Err(Error::Numeric(format!("pricing integral did not converge below u = {}", opts.max_u)));
        }
        let nodes_u: Vec<(f64, f64)> = (0..BATCH)
            .flat_map(|p| {
                let lo = start + p as f64 * width;
                nodes.iter().zip(&weights).map(move |(z, w)| (lo + 0.5 * width * (z + 1.0), 0.5 * width * w))
            })
            .collect();
        let values: Vec<f64> = nodes_u.par_iter().map(|&(u, _)| integrand(u)).collect::<Result<_>>()?;
        let batch: f64 = values.iter().zip(&nodes_u).map(|(v, (_, w))| v * w).sum();
        let batch_abs: f64 = values.iter().zip(&nodes_u).map(|(v, (_, w))| (v * w).abs()).sum();
        integral += batch;
        start += BATCH as f64 * width;
        let scale = strike / std::f64::consts::PI * (model.s0 / strike).powf(a);
        if scale * batch_abs < opts.abs_tol {
            return Ok((model.s0 - scale * integral).max(0.0));
        }
    }
}

/// Put by parity, `P = C − S0 + K` (no rates or dividends).
pub fn price_european_put(model: &HestonModel, strike: f64, grid: &Grid, opts: &PricingOptions) -> Result<f64> {
    Ok((price_european_call(model, strike, grid, opts)? - model.s0 + strike).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::model::{CharTriplet, InputCurve, JumpMeasure};
    use statrs::distribution::{ContinuousCDF, Normal};

    fn lognormal(var: f64) -> HestonModel {
        HestonModel {
            s0: 1.3,
            rho: 0.0,
            kernel: KernelSpec::constant(1.0),
            curve: InputCurve::constant(var),
            triplet: CharTriplet::new(0.0, 0.0, JumpMeasure::None).unwrap(),
        }
    }

    fn black_scholes(s0: f64, k: f64, total_var: f64) -> f64 {
        let n = Normal::standard();
        let sd = total_var.sqrt();
        let d1 = ((s0 / k).ln() + 0.5 * total_var) / sd;
        s0 * n.cdf(d1) - k * n.cdf(d1 - sd)
    }

    #[test]
    fn deterministic_variance_reproduces_black_scholes() {
        let g = Grid::new(1.0, 16).unwrap();
        let m = lognormal(0.04);
        for (k, a) in [(1.0, 0.5), (1.3, 0.5), (1.8, 0.25), (0.9, 0.75)] {
            let opts = PricingOptions { contour: a, ..Default::default() };
            let c = price_european_call(&m, k, &g, &opts).unwrap();
            let bs = black_scholes(1.3, k, 0.04);
            assert!((c - bs).abs() < 1e-8, "K = {k}, a = {a}: {c} vs {bs}");
            let p = price_european_put(&m, k, &g, &opts).unwrap();
            assert!((p - (bs - 1.3 + k)).abs() < 1e-8);
        }
    }

    #[test]
    fn contour_outside_the_strip_is_rejected() {
        let g = Grid::new(1.0, 16).unwrap();
        let opts = PricingOptions { contour: 1.5, ..Default::default() };
        assert!(price_european_call(&lognormal(0.04), 1.0, &g, &opts).is_err());
    }
}
