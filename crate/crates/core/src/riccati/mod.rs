//! The Riccati–Volterra equation `ψ = K * F(·, ψ)` with
//!
//! `F(s, u) = f0 + ½c f1² + (b + c f1) u + (c/2) u² + J(f2 + u)`,
//!
//! where `J(z) = ∫(e^{zζ} − 1 − zζ) ν(dζ)`, and the transform exponent
//! built from its solution.

mod curve;
mod exponent;
mod solver;

pub use curve::Curve;
pub use exponent::{closed_form_exponent, transform_exponent};
pub use solver::{solve_riccati, PsiPath, SolverOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Grid;
use crate::model::CharTriplet;

/// Coefficient curves `(f0, f1, f2)` and the characteristic triplet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiSpec {
    #[serde(default)]
    pub f0: Curve,
    #[serde(default)]
    pub f1: Curve,
    #[serde(default)]
    pub f2: Curve,
    pub triplet: CharTriplet,
}

impl RiccatiSpec {
    pub fn new(f0: Curve, f1: Curve, f2: Curve, triplet: CharTriplet) -> Self {
        RiccatiSpec { f0, f1, f2, triplet }
    }

    pub fn validate(&self) -> Result<()> {
        self.f0.validate()?;
        self.f1.validate()?;
        self.f2.validate()?;
        self.triplet.validate()
    }

    /// `F(s, u)`.
    #[allow(non_snake_case)]
    pub fn F(&self, s: f64, u: Complex64) -> Result<Complex64> {
        riccati_F(self, s, u)
    }
}

/// `F(s, u) = f0 + ½c f1² + (b + c f1) u + (c/2) u² + J(f2 + u)`.
#[allow(non_snake_case)]
pub fn riccati_F(spec: &RiccatiSpec, s: f64, u: Complex64) -> Result<Complex64> {
    let CharTriplet { b, c, nu } = &spec.triplet;
    let (f0, f1, f2) = (spec.f0.at(s), spec.f1.at(s), spec.f2.at(s));
    let j = nu.exp_integral(f2 + u)?;
    Ok(f0 + 0.5 * c * f1 * f1 + (b + c * f1) * u + 0.5 * c * u * u + j)
}

/// `∂F/∂u = b + c f1 + c u + J'(f2 + u)`.
#[allow(non_snake_case)]
pub fn riccati_F_du(spec: &RiccatiSpec, s: f64, u: Complex64) -> Result<Complex64> {
    let CharTriplet { b, c, nu } = &spec.triplet;
    let (f1, f2) = (spec.f1.at(s), spec.f2.at(s));
    Ok(b + c * f1 + c * u + nu.exp_integral_derivative(f2 + u)?)
}

/// Pointwise check on the grid nodes (and curve knots) of
/// `Re f0 + (c/2)(Re f1)² + ½(∫ζ²ν)(Re f2)² ≤ 0` and `Re f2 ≤ 0`.
pub fn check_sign_condition(spec: &RiccatiSpec, grid: &Grid) -> bool {
    let c = spec.triplet.c;
    let m2 = spec.triplet.nu.second_moment();
    let mut points: Vec<f64> = grid.nodes().collect();
    for curve in [&spec.f0, &spec.f1, &spec.f2] {
        points.extend(curve.knots(grid.horizon()));
    }
    points.into_iter().all(|s| {
        let (f0, f1, f2) = (spec.f0.at(s), spec.f1.at(s), spec.f2.at(s));
        f0.re + 0.5 * c * f1.re * f1.re + 0.5 * m2 * f2.re * f2.re <= 0.0 && f2.re <= 0.0
    })
}
