use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, InputCurve};
use crate::riccati::PsiPath;
use crate::simulate::PathBundle;

/// Adjusted forward curve `s ↦ G_t(s)` on the grid nodes of `[t, T]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardCurve {
    pub t: f64,
    /// Nodes `t = s_0 < s_1 < … < s_m = T`.
    pub s: Vec<f64>,
    /// `G_t(s_j)`.
    pub values: Vec<f64>,
}

/// `G_t(s) = G_0(s) + ∫_t^s g_t(u) du` with `g_t(u) = ∫_0^t K(u − r) dZ_r`.
///
/// The continuous part of `dZ` is spread uniformly over each step; jumps sit
/// at their exact times. The `u`-integral is then exact through the kernel's
/// first and second antiderivatives.
pub fn forward_curve_from_path(
    path: &PathBundle,
    triplet: &CharTriplet,
    kernel: &KernelSpec,
    curve: &InputCurve,
    t: f64,
) -> Result<ForwardCurve> {
    let grid = &path.grid;
    let Some(kt) = grid.index_of(t) else {
        return Err(Error::InvalidParameter(format!("t = {t} is not a grid node")));
    };
    if kt == grid.n_steps() {
        return Err(Error::InvalidParameter("t must be below the horizon".into()));
    }
    let t = grid.node(kt);
    let dt = grid.dt();
    let m1 = triplet.nu.first_moment();
    let ii = |x: f64| kernel.double_integral(x.max(0.0));
    let i1 = |x: f64| kernel.integral(x.max(0.0));
    let s: Vec<f64> = (kt..=grid.n_steps()).map(|j| grid.node(j)).collect();
    let mut values: Vec<f64> = s.iter().map(|&sj| curve.G0(kernel, sj)).collect();
    for k in 0..kt {
        let (a, b) = (grid.node(k), grid.node(k + 1));
        let dz = (triplet.b - m1) * (path.x[k + 1] - path.x[k]) + (path.mc[k + 1] - path.mc[k]);
        if dz == 0.0 {
            continue;
        }
        // ∫_t^s (1/Δt)∫_a^b K(u − r) dr du
        let base = ii(t - a) - ii(t - b);
        for (v, &sj) in values.iter_mut().zip(&s).skip(1) {
            *v += dz * (ii(sj - a) - ii(sj - b) - base) / dt;
        }
    }
    for &(tau, zeta) in path.jumps.iter().filter(|j| j.0 <= t) {
        let base = i1(t - tau);
        for (v, &sj) in values.iter_mut().zip(&s).skip(1) {
            *v += zeta * (i1(sj - tau) - base);
        }
    }
    Ok(ForwardCurve { t, s, values })
}

/// `∫_t^T F(T − s, ψ(T − s)) dG_t(s)`, trapezoid in `F` against the exact
/// increments of `G_t`.
///
/// `psi` must be solved on a grid with the same step as the forward curve and
/// horizon at least `T − t`.
pub fn conditional_exponent(psi: &PsiPath, forward: &ForwardCurve) -> Result<Complex64> {
    psi.ensure_finite()?;
    let m = forward.s.len() - 1;
    let dt = psi.grid().dt();
    if m > psi.grid().n_steps() {
        return Err(Error::InvalidParameter("Riccati grid is shorter than the forward curve".into()));
    }
    if m > 0 && ((forward.s[1] - forward.s[0]) - dt).abs() > 1e-9 * dt {
        return Err(Error::InvalidParameter("Riccati and path grids have different steps".into()));
    }
    let f = psi.f_values();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        // s_j ↔ τ = T − s_j = (m − j)Δt
        let dg = forward.values[j + 1] - forward.values[j];
        acc += 0.5 * (f[m - j] + f[m - j - 1]) * dg;
    }
    Ok(acc)
}
