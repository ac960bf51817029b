use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::kernels::KernelSpec;
use crate::model::{CharTriplet, InputCurve};
use crate::riccati::Curve;
use crate::simulate::{ComplexEstimate, PathBundle, RealEstimate};

/// `R_{0,T} = ∫f0(T−s)dX_s + ∫f1(T−s)dM^c_s + ∫f2(T−s)dM^d_s` on one path.
///
/// Grid increments use the left endpoint of each step; jumps enter at their
/// exact times.
pub fn functional_exponent(path: &PathBundle, f0: &Curve, f1: &Curve, f2: &Curve) -> Complex64 {
    functional_exponent_until(path, f0, f1, f2, path.grid.n_steps())
}

/// `R_{0,t}` for `t = t_steps`, with the coefficients still evaluated at
/// `T − s` for the path horizon `T`.
pub fn functional_exponent_until(path: &PathBundle, f0: &Curve, f1: &Curve, f2: &Curve, steps: usize) -> Complex64 {
    let grid = &path.grid;
    let horizon = grid.horizon();
    let steps = steps.min(grid.n_steps());
    let mut r = Complex64::new(0.0, 0.0);
    let mut j = 0;
    for k in 0..steps {
        let (t, t1) = (grid.node(k), grid.node(k + 1));
        let s = horizon - t;
        let dx = path.x[k + 1] - path.x[k];
        let dmc = path.mc[k + 1] - path.mc[k];
        let dmd = path.md[k + 1] - path.md[k];
        let last = k + 1 == grid.n_steps();
        let mut raw = 0.0;
        let mut weighted = Complex64::new(0.0, 0.0);
        while j < path.jumps.len() && (path.jumps[j].0 <= t1 || last) {
            let (when, size) = path.jumps[j];
            raw += size;
            weighted += f2.at(horizon - when) * size;
            j += 1;
        }
        // dM^d = jumps − compensator on this step.
        let compensator = raw - dmd;
        r += f0.at(s) * dx + f1.at(s) * dmc + weighted - f2.at(s) * compensator;
    }
    r
}

/// Mean and standard error of `exp(R_{0,T})` over a population.
pub fn mc_functional(paths: &[PathBundle], f0: &Curve, f1: &Curve, f2: &Curve) -> ComplexEstimate {
    let samples: Vec<Complex64> = paths.iter().map(|p| functional_exponent(p, f0, f1, f2).exp()).collect();
    ComplexEstimate::from_samples(&samples)
}

/// `sup_{|t_i − t_j| ≤ window·Δt} |v_i − v_j|` by a sliding max/min.
pub fn modulus_of_continuity(values: &[f64], window: usize) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        while maxq.front().is_some_and(|&j| j + window < i) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j + window < i) {
            minq.pop_front();
        }
        best = best.max(values[maxq[0]] - values[minq[0]]);
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModulusCheck {
    pub delta: f64,
    /// Empirical `E[w_{X̄,T}(δ)]`.
    pub lhs: RealEstimate,
    /// `3(κ² + κ)(1 + E[X_T²])(∫_0^δ K + ∫_0^T (K(s) − K(s+δ)) ds)`.
    pub rhs: f64,
    pub kappa: f64,
    pub pass: bool,
}

/// Compare the empirical modulus of continuity of `X̄ = X − G_0` with its
/// moment bound, given per-path moduli `w` and terminal values `X_T`.
pub fn modulus_bound_check(
    moduli: &[f64],
    terminal_x: &[f64],
    triplet: &CharTriplet,
    kernel: &KernelSpec,
    delta: f64,
    horizon: f64,
) -> ModulusCheck {
    let lhs = RealEstimate::from_samples(moduli);
    let second = RealEstimate::from_samples(&terminal_x.iter().map(|x| x * x).collect::<Vec<_>>()).mean;
    let kappa = triplet.b.abs() + triplet.c + triplet.nu.second_moment();
    let k_part = kernel.integral(delta) + kernel.integral(horizon) - (kernel.integral(horizon + delta) - kernel.integral(delta));
    let rhs = 3.0 * (kappa * kappa + kappa) * (1.0 + second) * k_part;
    ModulusCheck { delta, lhs, rhs, kappa, pass: lhs.mean <= rhs }
}

/// `G_0` at the grid nodes, the centring of [`path_moduli`] for exactly
/// integrated paths (Hawkes bundles).
pub fn g0_on_grid(curve: &InputCurve, kernel: &KernelSpec, grid: &crate::grid::Grid) -> Vec<f64> {
    grid.nodes().map(|t| curve.G0(kernel, t)).collect()
}

/// Left-point sums `Σ_{j<k} g_0(t_j)Δt`: the deterministic part of an Euler
/// `X`, and the matching centring for lift paths.
pub fn g0_left_sums(curve: &InputCurve, kernel: &KernelSpec, grid: &crate::grid::Grid) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        out.push(acc);
        acc += curve.g0(kernel, grid.node(k)) * grid.dt();
    }
    out
}

/// `w_{X̄,T}(δ)` of one path for each `δ` (rounded down to whole grid steps),
/// with `X̄ = X − G_0` and `G_0` sampled by [`g0_on_grid`].
pub fn path_moduli(path: &PathBundle, g0_nodes: &[f64], deltas: &[f64]) -> Vec<f64> {
    let xbar: Vec<f64> = path.x.iter().zip(g0_nodes).map(|(x, g)| x - g).collect();
    deltas.iter().map(|d| modulus_of_continuity(&xbar, (d / path.grid.dt() + 1e-9).floor() as usize)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn brute(values: &[f64], window: usize) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..values.len() {
            for j in i..values.len().min(i + window + 1) {
                best = best.max((values[i] - values[j]).abs());
            }
        }
        best
    }

    #[test]
    fn sliding_modulus_matches_brute_force() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64).sin() * (i as f64).sqrt()).collect();
        for w in [0, 1, 3, 10, 199, 500] {
            assert_eq!(modulus_of_continuity(&v, w), brute(&v, w));
        }
    }

    #[test]
    fn zero_functional_is_exactly_one() {
        let g = Grid::new(1.0, 4).unwrap();
        let p = PathBundle {
            grid: g,
            x: vec![0.0, 0.1, 0.3, 0.4, 0.6],
            mc: vec![0.0, 0.2, -0.1, 0.0, 0.3],
            jumps: vec![(0.3, 1.0)],
            md: vec![0.0, -0.1, 0.6, 0.5, 0.3],
            z: vec![0.0; 5],
        };
        let zero = Curve::zero();
        let e = mc_functional(&[p.clone(), p.clone()], &zero, &zero, &zero);
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
        assert_eq!(e.se_re, 0.0);
        // Constant coefficients reduce to terminal values.
        let (a, b, c) = (Complex64::new(0.0, 1.0), Complex64::new(0.0, -2.0), Complex64::new(0.0, 0.5));
        let r = functional_exponent(&p, &Curve::Constant(a), &Curve::Constant(b), &Curve::Constant(c));
        let expect = a * 0.6 + b * 0.3 + c * 0.3;
        assert!((r - expect).norm() < 1e-14);
    }
}
