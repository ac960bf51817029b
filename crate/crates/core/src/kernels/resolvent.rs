use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{KernelSpec, QuadWeights};
use crate::numeric::{gamma, gamma_p};
use crate::sampled::SampledFunction;

/// Second-kind resolvent `R` of `λK`: `R = λK + (λK) * R`.
///
/// Bounded kernels are solved directly by piecewise-linear product
/// integration. For power-law kernels the smoother remainder
/// `P = R − λK` is solved instead from `P = λ²(K*K) + λK*P`, using the
/// closed-form self-convolution.
#[derive(Clone, Debug)]
pub struct ResolventSecondKind {
    grid: Grid,
    lambda: f64,
    kernel: KernelSpec,
    /// `R(t_k)`; `+∞` at node 0 for kernels singular at the origin.
    values: Vec<f64>,
    /// Remainder `P(t_k)` when the decomposition is used.
    remainder: Option<Vec<f64>>,
    /// Mean of `P` on the first cell when `P(0+)` is infinite.
    first_cell_mean: Option<f64>,
    residual: f64,
}

pub fn resolvent_second_kind(spec: &KernelSpec, grid: &Grid) -> Result<ResolventSecondKind> {
    resolvent_second_kind_scaled(spec, 1.0, grid)
}

pub fn resolvent_second_kind_scaled(spec: &KernelSpec, lambda: f64, grid: &Grid) -> Result<ResolventSecondKind> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be finite, got {lambda}")));
    }
    let q = QuadWeights::new(spec, grid)?;
    let n = grid.n_steps();
    let singular = spec.is_singular_at_zero();

    // Source term and the node-0 value of the unknown.
    let (source, first_cell_mean): (Vec<f64>, Option<f64>) = if singular {
        let a = spec.alpha().unwrap_or(1.0);
        let src = grid.nodes().map(|t| lambda * lambda * spec.self_convolution(t)).collect::<Vec<_>>();
        let mean = (2.0 * a - 1.0 < 0.0).then(|| lambda * lambda * self_convolution_integral(spec, grid.dt()) / grid.dt());
        (src, mean)
    } else {
        let src = grid.nodes().map(|t| spec.eval(t).map(|k| lambda * k)).collect::<Result<Vec<_>>>()?;
        (src, None)
    };
    let mut u = vec![0.0; n + 1];
    u[0] = if singular {
        match spec.alpha() {
            Some(a) if (a - 0.5).abs() < 1e-15 => lambda * lambda,
            _ => 0.0,
        }
    } else {
        source[0]
    };

    let (lo, up) = (q.lower(), q.upper());
    let denom = 1.0 - lambda * up[0];
    if !(denom > 0.0) {
        return Err(Error::ResolventDivergence { node: 1 });
    }
    for k in 1..=n {
        // Σ over interior nodes of the product-trapezoid sum.
        let mut acc = 0.0;
        for j in 1..k {
            acc += (up[k - j] + lo[k - j - 1]) * u[j];
        }
        let v = match first_cell_mean {
            // Node 0 enters through the first-cell mean: u₀ ≈ 2·mean − u₁.
            Some(mean) if k == 1 => (source[1] + lambda * lo[0] * 2.0 * mean) / (1.0 - lambda * (up[0] - lo[0])),
            Some(mean) => (source[k] + lambda * (acc + lo[k - 1] * (2.0 * mean - u[1]))) / denom,
            None => (source[k] + lambda * (acc + lo[k - 1] * u[0])) / denom,
        };
        if !v.is_finite() || v.abs() > 1e300 {
            return Err(Error::ResolventDivergence { node: k });
        }
        u[k] = v;
    }

    let mut out = ResolventSecondKind {
        grid: *grid,
        lambda,
        kernel: spec.clone(),
        values: Vec::new(),
        remainder: None,
        first_cell_mean,
        residual: 0.0,
    };
    if singular {
        out.values = grid
            .nodes()
            .zip(&u)
            .map(|(t, p)| if t == 0.0 { f64::INFINITY } else { lambda * spec.eval(t).unwrap_or(f64::INFINITY) + p })
            .collect();
        out.remainder = Some(u);
    } else {
        out.values = u;
    }
    out.residual = out.node_residual(&q);
    Ok(out)
}

impl ResolventSecondKind {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `R(t_k)` for every node.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Largest identity residual `|R − λK − λK*R|` over nodes `t_k > 0`,
    /// with the convolution evaluated by a cell-midpoint rule independent of
    /// the solver's weights.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Nodes with a finite value, as `t,value` samples.
    pub fn sampled(&self) -> SampledFunction {
        let (t, v): (Vec<f64>, Vec<f64>) = self.grid.nodes().zip(&self.values).filter(|(_, v)| v.is_finite()).map(|(t, v)| (t, *v)).unzip();
        SampledFunction::new(t, v)
    }

    /// `∫_{t_j}^{t_{j+1}} R` for each cell.
    pub fn cell_integrals(&self) -> Vec<f64> {
        let dt = self.grid.dt();
        let n = self.grid.n_steps();
        match &self.remainder {
            Some(p) => (0..n)
                .map(|j| {
                    let k = self.lambda * self.kernel.cell_integral(self.grid.node(j), self.grid.node(j + 1));
                    let rem = match (j, self.first_cell_mean) {
                        (0, Some(mean)) => mean * dt,
                        _ => 0.5 * dt * (p[j] + p[j + 1]),
                    };
                    k + rem
                })
                .collect(),
            None => (0..n).map(|j| 0.5 * dt * (self.values[j] + self.values[j + 1])).collect(),
        }
    }

    fn node_residual(&self, q: &QuadWeights) -> f64 {
        let n = self.grid.n_steps();
        let w = q.cells();
        // Midpoint values of the unknown on each cell.
        let u: &[f64] = self.remainder.as_deref().unwrap_or(&self.values);
        let mid: Vec<f64> = (0..n)
            .map(|j| match (j, self.first_cell_mean) {
                (0, Some(mean)) => mean,
                _ => 0.5 * (u[j] + u[j + 1]),
            })
            .collect();
        let mut worst: f64 = 0.0;
        for k in 1..=n {
            let t = self.grid.node(k);
            let conv: f64 = (0..k).map(|m| w[m] * mid[k - 1 - m]).sum();
            let r = match self.remainder {
                Some(_) => u[k] - self.lambda * self.lambda * self.kernel.self_convolution(t) - self.lambda * conv,
                None => u[k] - self.lambda * self.kernel.eval(t).unwrap_or(f64::NAN) - self.lambda * conv,
            };
            worst = worst.max(r.abs());
        }
        worst
    }
}

/// `∫_0^t (K*K)(s) ds` for the power-law families.
fn self_convolution_integral(spec: &KernelSpec, t: f64) -> f64 {
    match spec {
        KernelSpec::Fractional { hurst } => {
            let a = hurst + 0.5;
            t.powf(2.0 * a) / gamma(2.0 * a + 1.0)
        }
        KernelSpec::Gamma { hurst, eta } => {
            let a = hurst + 0.5;
            if *eta == 0.0 {
                t.powf(2.0 * a) / gamma(2.0 * a + 1.0)
            } else {
                eta.powf(-2.0 * a) * gamma_p(2.0 * a, eta * t)
            }
        }
        _ => unreachable!("only power-law kernels take the decomposed route"),
    }
}

/// Absolutely continuous part of a first-kind resolvent.
#[derive(Clone, Debug, PartialEq)]
pub enum FirstKindDensity {
    Zero,
    /// `e^{−ηs} s^{−α} / Γ(1 − α) + η^α P(1 − α, ηs)`, the inverse of the
    /// gamma kernel; `η = 0` is the fractional case.
    Closed {
        alpha: f64,
        eta: f64,
    },
    /// Piecewise-constant density, stored as the mass of each grid cell.
    Sampled {
        cell_masses: Vec<f64>,
    },
}

/// First-kind resolvent `L` with `(K * L)(t) = 1`: an atom at the origin
/// plus a density.
#[derive(Clone, Debug)]
pub struct ResolventFirstKind {
    grid: Grid,
    atom: f64,
    density: FirstKindDensity,
    residual: f64,
}

/// Residual above which numeric deconvolution is rejected.
pub const DECONVOLUTION_TOLERANCE: f64 = 1e-2;

pub fn resolvent_first_kind(spec: &KernelSpec, grid: &Grid) -> Result<ResolventFirstKind> {
    spec.validate()?;
    let (atom, density) = match spec {
        KernelSpec::Fractional { hurst } if *hurst == 0.5 => (1.0, FirstKindDensity::Zero),
        KernelSpec::Fractional { hurst } => (0.0, FirstKindDensity::Closed { alpha: hurst + 0.5, eta: 0.0 }),
        KernelSpec::Gamma { hurst, eta } if *hurst == 0.5 => (1.0, FirstKindDensity::Closed { alpha: 1.0, eta: *eta }),
        KernelSpec::Gamma { hurst, eta } => (0.0, FirstKindDensity::Closed { alpha: hurst + 0.5, eta: *eta }),
        KernelSpec::Constant { value } if *value > 0.0 => (1.0 / value, FirstKindDensity::Zero),
        _ => {
            let k0 = spec.value_at_zero();
            if k0 == Some(0.0) || spec.integral(grid.horizon()) == 0.0 {
                return Err(Error::InvalidKernel("first-kind resolvent needs a kernel that is not identically zero".into()));
            }
            deconvolve(spec, grid, k0.map_or(0.0, |k| 1.0 / k))?
        }
    };
    let mut out = ResolventFirstKind { grid: *grid, atom, density, residual: 0.0 };
    out.residual = out.midpoint_residual(spec);
    if matches!(out.density, FirstKindDensity::Sampled { .. }) && !(out.residual <= DECONVOLUTION_TOLERANCE) {
        return Err(Error::Deconvolution { residual: out.residual, tolerance: DECONVOLUTION_TOLERANCE });
    }
    Ok(out)
}

/// Forward substitution on `atom·K(t_n) + Σ_j ℓ_j/Δt · ∫_{cell j} K(t_n − s) ds = 1`.
fn deconvolve(spec: &KernelSpec, grid: &Grid, atom: f64) -> Result<(f64, FirstKindDensity)> {
    let q = QuadWeights::new(spec, grid)?;
    let w = q.cells();
    let dt = grid.dt();
    let n = grid.n_steps();
    let mut ell = Vec::with_capacity(n);
    for k in 1..=n {
        let mut rhs = 1.0 - atom * spec.eval(grid.node(k))?;
        for (j, l) in ell.iter().enumerate() {
            rhs -= l / dt * w[k - 1 - j];
        }
        let v = rhs * dt / w[0];
        if !v.is_finite() {
            return Err(Error::ResolventDivergence { node: k });
        }
        ell.push(v);
    }
    Ok((atom, FirstKindDensity::Sampled { cell_masses: ell }))
}

impl ResolventFirstKind {
    pub fn atom(&self) -> f64 {
        self.atom
    }

    pub fn density(&self) -> &FirstKindDensity {
        &self.density
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Largest `|(K*L)(t) − 1|` over cell midpoints, where the numeric
    /// density is not constrained.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `L([0, t])`.
    pub fn mass(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        self.atom
            + match &self.density {
                FirstKindDensity::Zero => 0.0,
                FirstKindDensity::Closed { alpha, eta } => closed_mass(*alpha, *eta, t),
                FirstKindDensity::Sampled { cell_masses } => {
                    let dt = self.grid.dt();
                    cell_masses.iter().enumerate().map(|(j, m)| m * ((t - j as f64 * dt) / dt).clamp(0.0, 1.0)).sum()
                }
            }
    }

    /// Density samples at cell midpoints (`t,value`).
    pub fn density_samples(&self) -> SampledFunction {
        let dt = self.grid.dt();
        let n = self.grid.n_steps();
        let t: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dt).collect();
        let v = match &self.density {
            FirstKindDensity::Zero => vec![0.0; n],
            FirstKindDensity::Closed { alpha, eta } => t.iter().map(|&s| closed_density(*alpha, *eta, s)).collect(),
            FirstKindDensity::Sampled { cell_masses } => cell_masses.iter().map(|m| m / dt).collect(),
        };
        SampledFunction::new(t, v)
    }

    /// `∫_{[0,t]} k(t − s) L(ds)` for `t > 0`, where `k` is any kernel.
    pub fn convolve(&self, k: &KernelSpec, t: f64) -> f64 {
        if t <= 0.0 {
            return self.atom * k.value_at_zero().unwrap_or(f64::INFINITY);
        }
        let atom = if self.atom == 0.0 { 0.0 } else { self.atom * k.eval(t).unwrap_or(f64::INFINITY) };
        atom + match &self.density {
            FirstKindDensity::Zero => 0.0,
            FirstKindDensity::Closed { alpha, eta } => convolve_power_density(k, *alpha, *eta, t),
            FirstKindDensity::Sampled { cell_masses } => {
                let dt = self.grid.dt();
                let mut acc = 0.0;
                for (j, m) in cell_masses.iter().enumerate() {
                    let a = j as f64 * dt;
                    if a >= t {
                        break;
                    }
                    let b = (a + dt).min(t);
                    acc += m / dt * k.cell_integral(t - b, t - a);
                }
                acc
            }
        }
    }

    fn midpoint_residual(&self, spec: &KernelSpec) -> f64 {
        let dt = self.grid.dt();
        let n = self.grid.n_steps();
        // The closed form is checked on a coarser subset; every cell otherwise.
        let stride = match self.density {
            FirstKindDensity::Sampled { .. } => 1,
            _ => (n / 200).max(1),
        };
        (0..n).step_by(stride).map(|j| (self.convolve(spec, (j as f64 + 0.5) * dt) - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn closed_density(alpha: f64, eta: f64, s: f64) -> f64 {
    if alpha == 1.0 {
        return eta;
    }
    let mut v = (-eta * s).exp() * s.powf(-alpha) / gamma(1.0 - alpha);
    if eta > 0.0 {
        v += eta.powf(alpha) * gamma_p(1.0 - alpha, eta * s);
    }
    v
}

/// Mass of the closed-form density on `(0, t]`.
fn closed_mass(alpha: f64, eta: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        return eta * t;
    }
    let a = 1.0 - alpha;
    if eta == 0.0 {
        return t.powf(a) / gamma(1.0 + a);
    }
    let x = eta * t;
    // ∫_0^x P(a, y) dy = x P(a, x) − a P(a + 1, x)
    eta.powf(alpha - 1.0) * gamma_p(a, x) + eta.powf(alpha - 1.0) * (x * gamma_p(a, x) - a * gamma_p(a + 1.0, x))
}

/// `∫_0^t k(t − s) ℓ(s) ds` for the closed-form density `ℓ`, split at `t/2`
/// so that each half has one smooth factor, integrated by product trapezoid
/// against the exact moments of the other.
fn convolve_power_density(k: &KernelSpec, alpha: f64, eta: f64, t: f64) -> f64 {
    const M: usize = 256;
    if alpha == 1.0 {
        // Gamma kernel with H = 1/2: L = δ₀ + η ds.
        return eta * k.integral(t);
    }
    let g = gamma(1.0 - alpha);
    // ℓ(s) = s^{−α}/Γ(1−α) · smooth(s)
    let smooth = |s: f64| {
        let mut v = (-eta * s).exp();
        if eta > 0.0 && s > 0.0 {
            v += g * eta.powf(alpha) * gamma_p(1.0 - alpha, eta * s) * s.powf(alpha);
        }
        v
    };
    // ∫_a^b s^{−α}/Γ(1−α) ds and ∫_a^b s·s^{−α}/Γ(1−α) ds
    let d0 = |a: f64, b: f64| (b.powf(1.0 - alpha) - a.powf(1.0 - alpha)) / ((1.0 - alpha) * g);
    let d1 = |a: f64, b: f64| (b.powf(2.0 - alpha) - a.powf(2.0 - alpha)) / ((2.0 - alpha) * g);
    let half = 0.5 * t;
    let h = half / M as f64;
    let mut acc = 0.0;
    for i in 0..M {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        // s ∈ [0, t/2]: power weight, the rest smooth.
        let (w0, w1) = (d0(a, b), d1(a, b));
        let wb = (w1 - a * w0) / h;
        let wa = w0 - wb;
        acc += wa * k.eval(t - a).unwrap_or(0.0) * smooth(a) + wb * k.eval(t - b).unwrap_or(0.0) * smooth(b);
        // s ∈ [t/2, t]: kernel weight, density smooth.
        let (a2, b2) = (half + a, half + b);
        let k0 = k.cell_integral(t - b2, t - a2);
        // ∫_{a2}^{b2} s k(t−s) ds = t·k0 − ∫ u k(u) du over u ∈ [t−b2, t−a2]
        let k1 = t * k0 - (k.first_moment(t - a2) - k.first_moment(t - b2));
        let kb = ((k1 - a2 * k0) / h).clamp(0.0, k0);
        let ka = k0 - kb;
        acc += ka * closed_density(alpha, eta, a2) + kb * closed_density(alpha, eta, b2);
    }
    acc
}
