use crate::error::Result;
use crate::grid::Grid;
use crate::kernels::KernelSpec;

/// Exact cell integrals of a kernel on a uniform grid.
///
/// For cell `m = [t_m, t_{m+1}]`:
/// - `cell[m] = ∫ K(u) du`
/// - `lower[m] = (1/Δt) ∫ (u − t_m) K(u) du`, the weight of the node furthest from the origin
///   under piecewise-linear product integration,
/// - `upper[m] = (1/Δt) ∫ (t_{m+1} − u) K(u) du`, the weight of the node nearer the origin.
///
/// `lower[m] + upper[m] = cell[m]`.
#[derive(Clone, Debug)]
pub struct QuadWeights {
    dt: f64,
    cell: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl QuadWeights {
    pub fn new(spec: &KernelSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        let n = grid.n_steps();
        let dt = grid.dt();
        let cum: Vec<f64> = grid.nodes().map(|t| spec.integral(t)).collect();
        let mom: Vec<f64> = grid.nodes().map(|t| spec.first_moment(t)).collect();
        let mut cell = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for m in 0..n {
            let w = (cum[m + 1] - cum[m]).max(0.0);
            let m1 = mom[m + 1] - mom[m];
            let t_lo = grid.node(m);
            // Clamp tiny negative round-off; the two pieces must still sum to w.
            let lo = ((m1 - t_lo * w) / dt).clamp(0.0, w);
            cell.push(w);
            lower.push(lo);
            upper.push(w - lo);
        }
        Ok(QuadWeights { dt, cell, lower, upper })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.cell.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell.is_empty()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cell
    }

    pub fn cell(&self, m: usize) -> f64 {
        self.cell[m]
    }

    /// `(lower[m], upper[m])`.
    pub fn linear(&self, m: usize) -> (f64, f64) {
        (self.lower[m], self.upper[m])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `Σ_m cell[m] ≈ ∫_0^T K`.
    pub fn total(&self) -> f64 {
        self.cell.iter().sum()
    }
}
