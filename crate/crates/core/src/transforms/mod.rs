//! Exponential-affine Fourier–Laplace formulas.
//!
//! For `R_{0,T} = ∫f0(T−s)dX_s + ∫f1(T−s)dM^c_s + ∫f2(T−s)dM^d_s`,
//! `E[exp(R_{0,T})] = exp(∫_0^T F(T−s, ψ(T−s)) dG_0(s))` with `ψ` the
//! Riccati–Volterra solution. The Hawkes and hyper-rough Heston cases are
//! parameterizations of the same system.

mod forward;
mod heston;
mod pricing;

pub use forward::{conditional_exponent, forward_curve_from_path, ForwardCurve};
pub use heston::{heston_cf_logprice, heston_joint_transform, HestonModel};
pub use pricing::{price_european_call, price_european_put, PricingOptions};

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, InputCurve};
use crate::riccati::{solve_riccati, transform_exponent, Curve, PsiPath, RiccatiSpec, SolverOptions};

/// Solution and exponent of one transform evaluation.
#[derive(Clone, Debug)]
pub struct TransformResult {
    pub psi: PsiPath,
    pub exponent: Complex64,
}

impl TransformResult {
    pub fn value(&self) -> Complex64 {
        self.exponent.exp()
    }
}

/// Solve the Riccati system for `spec` and integrate against `dG_0`.
pub fn solve_transform(
    spec: &RiccatiSpec,
    kernel: &KernelSpec,
    curve: &InputCurve,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<TransformResult> {
    spec.validate()?;
    curve.validate()?;
    let psi = solve_riccati(spec, kernel, grid, opts)?;
    let exponent = transform_exponent(&psi, curve, kernel)?;
    Ok(TransformResult { psi, exponent })
}

/// `E[exp(R_{0,T})]` with `T = grid.horizon()`.
#[allow(clippy::too_many_arguments)]
pub fn fourier_laplace(
    f0: &Curve,
    f1: &Curve,
    f2: &Curve,
    triplet: &CharTriplet,
    kernel: &KernelSpec,
    curve: &InputCurve,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<Complex64> {
    let spec = RiccatiSpec::new(f0.clone(), f1.clone(), f2.clone(), triplet.clone());
    Ok(solve_transform(&spec, kernel, curve, grid, opts)?.value())
}

/// Riccati data for `E[exp(∫h0(T−s)λ_s ds + ∫h2(T−s)dN_s)]`.
///
/// With the triplet `(1, 0, δ₁)`, `M^d = N − X`, so `f0 = h0 + h2` and
/// `f2 = h2` give `F(s, u) = h0(s) + e^{h2(s) + u} − 1`.
pub fn hawkes_spec(h0: &Curve, h2: &Curve) -> RiccatiSpec {
    RiccatiSpec::new(h0.add(h2), Curve::zero(), h2.clone(), CharTriplet::hawkes())
}

/// Joint transform of integrated intensity and counts of a Hawkes process
/// with baseline `g0` and excitation kernel `kernel`.
pub fn hawkes_transform(
    h0: &Curve,
    h2: &Curve,
    g0: &InputCurve,
    kernel: &KernelSpec,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<Complex64> {
    Ok(solve_transform(&hawkes_spec(h0, h2), kernel, g0, grid, opts)?.value())
}
