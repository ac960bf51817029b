use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{resolvent_first_kind, KernelSpec};
use crate::sampled::SampledFunction;

/// Input curve `G_0(t) = ∫_0^t g_0(s) ds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputCurve {
    /// `g_0(t) = x0 + θ ∫_0^t K(s) ds`.
    AffineInK { x0: f64, theta: f64 },
    /// Continuous non-decreasing `g_0`, linear between samples and constant
    /// after the last one. `t` must start at 0.
    NonDecreasingTable { t: Vec<f64>, values: Vec<f64> },
}

impl InputCurve {
    pub fn constant(x0: f64) -> Self {
        InputCurve::AffineInK { x0, theta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            InputCurve::AffineInK { x0, theta } => {
                if !(*x0 >= 0.0 && x0.is_finite() && *theta >= 0.0 && theta.is_finite()) {
                    return bad(format!("x0 and theta must be nonnegative, got ({x0}, {theta})"));
                }
                Ok(())
            }
            InputCurve::NonDecreasingTable { t, values } => {
                if t.is_empty() || t.len() != values.len() {
                    return bad("table needs matching, nonempty t and values".into());
                }
                if t[0] != 0.0 {
                    return bad("table must start at t = 0".into());
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("table times must be strictly increasing".into());
                }
                if !(values[0] >= 0.0) || values.iter().any(|v| !v.is_finite()) {
                    return bad("table needs finite values with g0(0) >= 0".into());
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return bad("table values must be non-decreasing".into());
                }
                Ok(())
            }
        }
    }

    /// `g_0(t)`.
    pub fn g0(&self, kernel: &KernelSpec, t: f64) -> f64 {
        match self {
            InputCurve::AffineInK { x0, theta } => x0 + theta * kernel.integral(t),
            InputCurve::NonDecreasingTable { t: ts, values } => {
                let j = segment(ts, t);
                if j + 1 == ts.len() {
                    values[j]
                } else {
                    let w = (t - ts[j]) / (ts[j + 1] - ts[j]);
                    values[j] + w * (values[j + 1] - values[j])
                }
            }
        }
    }

    /// `G_0(t) = ∫_0^t g_0`.
    #[allow(non_snake_case)]
    pub fn G0(&self, kernel: &KernelSpec, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            InputCurve::AffineInK { x0, theta } => x0 * t + theta * kernel.double_integral(t),
            InputCurve::NonDecreasingTable { t: ts, .. } => self.table_moments(kernel, ts, t).0,
        }
    }

    /// `∫_0^t s g_0(s) ds`.
    pub fn g0_first_moment(&self, kernel: &KernelSpec, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            InputCurve::AffineInK { x0, theta } => {
                // ∫ s I(s) ds = (t² I(t) − M₂(t)) / 2
                0.5 * x0 * t * t + 0.5 * theta * (t * t * kernel.integral(t) - kernel.second_moment(t))
            }
            InputCurve::NonDecreasingTable { t: ts, .. } => self.table_moments(kernel, ts, t).1,
        }
    }

    /// Zeroth and first moments of the piecewise-linear table on `[0, t]`.
    fn table_moments(&self, kernel: &KernelSpec, ts: &[f64], t: f64) -> (f64, f64) {
        let mut breaks: Vec<f64> = ts.iter().copied().take_while(|&s| s < t).collect();
        breaks.push(t);
        let (mut m0, mut m1) = (0.0, 0.0);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ga, gb) = (self.g0(kernel, a), self.g0(kernel, b));
            let h = b - a;
            m0 += 0.5 * h * (ga + gb);
            // exact for a linear integrand: h/6 (2a ga + a gb + b ga + 2b gb)
            m1 += h / 6.0 * (2.0 * a * ga + a * gb + b * ga + 2.0 * b * gb);
        }
        (m0, m1)
    }
}

fn segment(ts: &[f64], t: f64) -> usize {
    match ts.binary_search_by(|s| s.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(j) => j,
        Err(0) => 0,
        Err(j) => j - 1,
    }
}

/// Values below this are treated as violations of admissibility.
pub const ADMISSIBILITY_TOLERANCE: f64 = -1e-8;

/// Left-hand side of the admissibility inequality
/// `Δ_h g_0 − φ(0) g_0 − dφ * g_0 ≥ 0` with `φ = Δ_hK * L`, sampled on the grid.
///
/// The measure `dφ` is discretized by first differences of `φ` at the
/// nodes, each assigned to its cell's midpoint.
pub fn admissibility_residual(curve: &InputCurve, kernel: &KernelSpec, h: f64, grid: &Grid) -> Result<SampledFunction> {
    admissibility_residual_with(|t| curve.g0(kernel, t), kernel, h, grid)
}

/// Same as [`admissibility_residual`] for an arbitrary `g_0`.
pub fn admissibility_residual_with<G: Fn(f64) -> f64>(g0: G, kernel: &KernelSpec, h: f64, grid: &Grid) -> Result<SampledFunction> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("shift h must be positive, got {h}")));
    }
    let l = resolvent_first_kind(kernel, grid).map_err(|e| match e {
        Error::Deconvolution { .. } | Error::ResolventDivergence { .. } => Error::UnsupportedKernel(format!("admissibility check ({e})")),
        e => e,
    })?;
    let shifted = KernelSpec::shifted(kernel.clone(), h);
    let phi: Vec<f64> = grid.nodes().map(|t| l.convolve(&shifted, t)).collect();
    let dt = grid.dt();
    let g_mid: Vec<f64> = (0..grid.n_steps()).map(|k| g0((k as f64 + 0.5) * dt)).collect();
    let mut values = Vec::with_capacity(grid.len());
    for (n, t) in grid.nodes().enumerate() {
        // Cell k of s contributes g0(t_n − mid_k)·(φ_{k+1} − φ_k).
        let conv: f64 = (0..n).map(|k| g_mid[n - 1 - k] * (phi[k + 1] - phi[k])).sum();
        values.push(g0(t + h) - phi[0] * g0(t) - conv);
    }
    Ok(SampledFunction::new(grid.nodes().collect(), values))
}
