use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{KernelSpec, QuadWeights};
use crate::riccati::{riccati_F, riccati_F_du, RiccatiSpec};
use crate::sampled::fmt_f64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub corrector_sweeps: usize,
    pub blowup_cap: f64,
    /// Replace `F(s, u)` by `F(s, min(Re u, 0) + i Im u)`.
    pub clip: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { corrector_sweeps: 2, blowup_cap: 1e8, clip: false }
    }
}

/// Solution `ψ(t_k)` on a grid.
#[derive(Clone, Debug)]
pub struct PsiPath {
    grid: Grid,
    values: Vec<Complex64>,
    f_values: Vec<Complex64>,
    blowup: Option<usize>,
}

impl PsiPath {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `F(t_k, ψ(t_k))` at the final iterate.
    pub fn f_values(&self) -> &[Complex64] {
        &self.f_values
    }

    /// First node where `|ψ|` exceeded the cap, if any. Later values are NaN.
    pub fn blowup(&self) -> Option<usize> {
        self.blowup
    }

    pub fn is_blown_up(&self) -> bool {
        self.blowup.is_some()
    }

    /// Error if the solution blew up.
    pub fn ensure_finite(&self) -> Result<&Self> {
        match self.blowup {
            Some(node) => Err(Error::Blowup { node, t: self.grid.node(node) }),
            None => Ok(self),
        }
    }

    pub fn terminal(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with columns `t,re_psi,im_psi`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "re_psi", "im_psi"])?;
        for (t, z) in self.grid.nodes().zip(&self.values) {
            wtr.write_record([fmt_f64(t), fmt_f64(z.re), fmt_f64(z.im)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Predictor–corrector product integration of `ψ = K * F(·, ψ)`.
///
/// The predictor holds `F` constant on each past cell (left value) against the
/// exact kernel cell integrals. Each corrector sweep uses the piecewise-linear
/// interpolant of `F` through all nodes, with the current node re-evaluated at
/// the latest iterate.
pub fn solve_riccati(spec: &RiccatiSpec, kernel: &KernelSpec, grid: &Grid, opts: &SolverOptions) -> Result<PsiPath> {
    spec.validate()?;
    let q = QuadWeights::new(kernel, grid)?;
    let n = grid.n_steps();
    let zero = Complex64::new(0.0, 0.0);
    let eval = |s: f64, u: Complex64| {
        let u = if opts.clip { Complex64::new(u.re.min(0.0), u.im) } else { u };
        riccati_F(spec, s, u)
    };
    let (w, lo, up) = (q.cells(), q.lower(), q.upper());
    let mut psi = vec![Complex64::new(f64::NAN, f64::NAN); n + 1];
    let mut f = vec![Complex64::new(f64::NAN, f64::NAN); n + 1];
    psi[0] = zero;
    f[0] = eval(0.0, zero)?;
    let mut blowup = None;
    for k in 1..=n {
        let t = grid.node(k);
        let mut pred = zero;
        let mut hist = lo[k - 1] * f[0];
        for j in 0..k {
            pred += w[k - 1 - j] * f[j];
        }
        for j in 1..k {
            hist += (up[k - j] + lo[k - j - 1]) * f[j];
        }
        let mut u = pred;
        let mut swept = Ok(());
        for _ in 0..opts.corrector_sweeps {
            match eval(t, u) {
                Ok(fu) => u = hist + up[0] * fu,
                Err(e) => {
                    swept = Err(e);
                    break;
                }
            }
        }
        // The sweeps contract only while |up[0] F_u| < 1. Outside that regime
        // (strongly singular kernels, stiff F) the node equation can also have
        // spurious roots, so it is solved by continuation from the history term.
        let node = NodeEquation { spec, t, hist, a: up[0], clip: opts.clip };
        let residual = swept.and_then(|_| node.residual(u));
        let settled =
            matches!(residual, Ok(r) if r <= NODE_TOLERANCE * (1.0 + u.norm())) && matches!(node.slope(u), Some(d) if d.norm() < 0.5);
        if !settled {
            match node.continuation() {
                Some(v) => u = v,
                None => {
                    residual?;
                }
            }
        }
        if !(u.norm() <= opts.blowup_cap) {
            blowup = Some(k);
            break;
        }
        psi[k] = u;
        f[k] = eval(t, u)?;
    }
    Ok(PsiPath { grid: *grid, values: psi, f_values: f, blowup })
}

/// Relative residual above which the corrector sweeps count as stalled.
const NODE_TOLERANCE: f64 = 1e-8;

/// `u = hist + s a F(t, u)` for `s ∈ [0, 1]`.
struct NodeEquation<'a> {
    spec: &'a RiccatiSpec,
    t: f64,
    hist: Complex64,
    a: f64,
    clip: bool,
}

impl NodeEquation<'_> {
    fn clipped(&self, u: Complex64) -> Complex64 {
        if self.clip {
            Complex64::new(u.re.min(0.0), u.im)
        } else {
            u
        }
    }

    fn f(&self, u: Complex64) -> Option<Complex64> {
        riccati_F(self.spec, self.t, self.clipped(u)).ok().filter(|z| z.is_finite())
    }

    /// `a F_u`; with clipping it is taken at the clipped point.
    fn slope(&self, u: Complex64) -> Option<Complex64> {
        riccati_F_du(self.spec, self.t, self.clipped(u)).ok().map(|d| self.a * d)
    }

    fn residual(&self, u: Complex64) -> Result<f64> {
        Ok((u - self.hist - self.a * riccati_F(self.spec, self.t, self.clipped(u))?).norm())
    }

    /// Newton at fixed `s`; `None` unless it converges quickly.
    fn newton(&self, s: f64, mut u: Complex64) -> Option<Complex64> {
        for _ in 0..12 {
            let g = u - self.hist - s * self.a * self.f(u)?;
            if g.norm() <= 1e-13 * (1.0 + u.norm()) {
                return Some(u);
            }
            u -= g / (1.0 - s * self.slope(u)?);
        }
        let g = u - self.hist - s * self.a * self.f(u)?;
        (g.norm() <= NODE_TOLERANCE * (1.0 + u.norm())).then_some(u)
    }

    /// Tracks the root from `u = hist` at `s = 0` with tangent predictor and
    /// Newton corrector, halving the step whenever the corrector wanders.
    fn continuation(&self) -> Option<Complex64> {
        let (mut s, mut u, mut ds) = (0.0, self.hist, 1.0f64);
        while s < 1.0 {
            let step = ds.min(1.0 - s);
            let tangent = self.a * self.f(u)? / (1.0 - s * self.slope(u)?);
            let guess = u + step * tangent;
            match self.newton(s + step, guess) {
                Some(v) if (v - guess).norm() <= 0.1 * (1.0 + u.norm()) => {
                    s += step;
                    u = v;
                    ds = (2.0 * step).min(1.0);
                }
                _ => {
                    ds = step / 2.0;
                    if ds < 1e-6 {
                        return None;
                    }
                }
            }
        }
        Some(u)
    }
}
