use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, InputCurve};
use crate::riccati::{closed_form_exponent, solve_riccati, transform_exponent, Curve, RiccatiSpec, SolverOptions};

/// Hyper-rough Heston model: `log S_t = log S_0 − ½X_t + M^S_t` with
/// `d⟨M^S⟩ = dX`, `d⟨M^S, M^c⟩ = ρ√c dX`, and `X` the affine Volterra
/// integrated variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HestonModel {
    pub s0: f64,
    pub rho: f64,
    pub kernel: KernelSpec,
    pub curve: InputCurve,
    pub triplet: CharTriplet,
}

impl HestonModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidParameter(format!("s0 must be positive, got {}", self.s0)));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        if self.triplet.c == 0.0 && self.rho != 0.0 {
            return Err(Error::InvalidParameter("rho must be 0 when c = 0".into()));
        }
        self.kernel.validate()?;
        self.curve.validate()?;
        self.triplet.validate()
    }

    /// Riccati coefficients for `E[exp(h0 X_T + h1 log(S_T/S_0))]`:
    /// `f0 = h0 + ½(h1² − h1) − ½ρ²h1²`, `f1 = ρh1/√c`, `f2 = 0`.
    pub fn riccati_spec(&self, h0: Complex64, h1: Complex64) -> Result<RiccatiSpec> {
        self.validate()?;
        let f0 = h0 + 0.5 * (h1 * h1 - h1) - 0.5 * self.rho * self.rho * h1 * h1;
        let f1 = if self.rho == 0.0 { Complex64::new(0.0, 0.0) } else { self.rho * h1 / self.triplet.c.sqrt() };
        let curve = |z: Complex64| if z == Complex64::new(0.0, 0.0) { Curve::zero() } else { Curve::Constant(z) };
        Ok(RiccatiSpec::new(curve(f0), curve(f1), Curve::zero(), self.triplet.clone()))
    }

    /// `ln E[exp(h0 X_T + h1 log(S_T/S_0))]` on `grid`.
    ///
    /// Uses the closed form `x0∫F + θ∫ψ` for `AffineInK` curves.
    pub fn joint_exponent(&self, h0: Complex64, h1: Complex64, grid: &Grid, opts: &SolverOptions) -> Result<Complex64> {
        let spec = self.riccati_spec(h0, h1)?;
        let psi = solve_riccati(&spec, &self.kernel, grid, opts)?;
        match closed_form_exponent(&psi, &self.curve, &self.kernel)? {
            Some(e) => Ok(e),
            None => transform_exponent(&psi, &self.curve, &self.kernel),
        }
    }

    /// `E[exp(h0 X_T + h1 log S_T)]`.
    pub fn joint_transform(&self, h0: Complex64, h1: Complex64, grid: &Grid, opts: &SolverOptions) -> Result<Complex64> {
        let e = self.joint_exponent(h0, h1, grid, opts)?;
        Ok((e + h1 * self.s0.ln()).exp())
    }

    /// `E[exp(iv log S_T)]`.
    pub fn cf_logprice(&self, v: f64, grid: &Grid, opts: &SolverOptions) -> Result<Complex64> {
        self.joint_transform(Complex64::new(0.0, 0.0), Complex64::new(0.0, v), grid, opts)
    }
}

/// `E[exp(h0 X_T + h1 log S_T)]` with `T = grid.horizon()`.
pub fn heston_joint_transform(model: &HestonModel, h0: Complex64, h1: Complex64, grid: &Grid, opts: &SolverOptions) -> Result<Complex64> {
    model.joint_transform(h0, h1, grid, opts)
}

/// `E[exp(iv log S_T)]` with `T = grid.horizon()`.
pub fn heston_cf_logprice(model: &HestonModel, v: f64, grid: &Grid, opts: &SolverOptions) -> Result<Complex64> {
    model.cf_logprice(v, grid, opts)
}
