use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{ExpTerm, KernelSpec};
use crate::model::InputCurve;
use crate::sampled::SampledFunction;
use crate::simulate::{path_rng, PathBundle};

/// Number of lookahead windows per horizon used to bound `g_0`.
const WINDOWS: f64 = 256.0;

/// Self-excitation `Σ_{τ_i < t} K(t − τ_i)`, kept as a Markov state for
/// exponential sums.
enum Excitation<'a> {
    Exp { terms: &'a [ExpTerm], state: Vec<f64>, at: f64 },
    General { kernel: &'a KernelSpec, events: Vec<f64> },
}

impl<'a> Excitation<'a> {
    fn new(kernel: &'a KernelSpec) -> Self {
        match kernel {
            KernelSpec::ExpSum { terms } => Excitation::Exp { terms, state: vec![0.0; terms.len()], at: 0.0 },
            _ => Excitation::General { kernel, events: Vec::new() },
        }
    }

    /// Value at `t`, no earlier than the last call on an `Exp` state.
    fn value(&mut self, t: f64) -> f64 {
        match self {
            Excitation::Exp { terms, state, at } => {
                let dt = t - *at;
                for (s, e) in state.iter_mut().zip(terms.iter()) {
                    *s *= (-e.rate * dt).exp();
                }
                *at = t;
                state.iter().sum()
            }
            Excitation::General { kernel, events } => events.iter().map(|&s| kernel.eval(t - s).unwrap_or(0.0)).sum(),
        }
    }

    /// Record an event at `t` (after `value(t)` was taken).
    fn push(&mut self, t: f64) {
        match self {
            Excitation::Exp { terms, state, .. } => {
                for (s, e) in state.iter_mut().zip(terms.iter()) {
                    *s += e.weight;
                }
            }
            Excitation::General { events, .. } => events.push(t),
        }
    }
}

fn check_kernel(kernel: &KernelSpec) -> Result<()> {
    kernel.validate()?;
    if kernel.is_singular_at_zero() {
        return Err(Error::UnsupportedKernel(format!(
            "Hawkes thinning with a kernel unbounded at 0 ({kernel:?}); approximate it with {{\"type\": \"shifted\", \"base\": ..., \"h\": 1/n}} or an exponential sum"
        )));
    }
    Ok(())
}

/// Event times of one Hawkes path with intensity `g_0(t) + Σ_{τ_i < t} K(t − τ_i)`
/// on `[0, horizon]`, by Ogata thinning.
///
/// Inside each lookahead window the dominating rate is `g_0` at the window
/// end plus the excitation at the current time, which bounds the intensity
/// because `g_0` is non-decreasing and `K` non-increasing.
pub fn simulate_hawkes_path<R: Rng + ?Sized>(g0: &InputCurve, kernel: &KernelSpec, horizon: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_kernel(kernel)?;
    g0.validate()?;
    let window = horizon / WINDOWS;
    let mut exc = Excitation::new(kernel);
    let mut events = Vec::new();
    let mut t = 0.0;
    while t < horizon {
        let end = (t + window).min(horizon);
        let bound = g0.g0(kernel, end) + exc.value(t);
        if !(bound > 0.0) {
            t = end;
            continue;
        }
        let e: f64 = Exp1.sample(rng);
        let s = t + e / bound;
        if s >= end {
            t = end;
            continue;
        }
        let lambda = g0.g0(kernel, s) + exc.value(s);
        if rng.random::<f64>() * bound < lambda {
            events.push(s);
            exc.push(s);
        }
        t = s;
    }
    Ok(events)
}

/// Path 0 of the population for `seed`.
pub fn simulate_hawkes(g0: &InputCurve, kernel: &KernelSpec, horizon: f64, seed: u64) -> Result<Vec<f64>> {
    simulate_hawkes_path(g0, kernel, horizon, &mut path_rng(seed, 0))
}

/// `n_paths` independent event lists, in path order.
pub fn simulate_hawkes_population(g0: &InputCurve, kernel: &KernelSpec, horizon: f64, seed: u64, n_paths: usize) -> Result<Vec<Vec<f64>>> {
    check_kernel(kernel)?;
    (0..n_paths as u64).into_par_iter().map(|p| simulate_hawkes_path(g0, kernel, horizon, &mut path_rng(seed, p))).collect()
}

/// `∫_0^t λ_s ds = G_0(t) + Σ_{τ_i < t} I(t − τ_i)`.
fn integrated_intensity(events: &[f64], g0: &InputCurve, kernel: &KernelSpec, t: f64) -> f64 {
    g0.G0(kernel, t) + events.iter().take_while(|&&s| s < t).map(|&s| kernel.integral(t - s)).sum::<f64>()
}

/// `X^n(t) = ∫_0^t λ_{ns} ds = (1/n) ∫_0^{nt} λ_u du` at the grid nodes, for
/// events simulated on `[0, n·T]`.
pub fn rescaled_integrated_intensity(events: &[f64], n: usize, g0: &InputCurve, kernel: &KernelSpec, grid: &Grid) -> SampledFunction {
    let scale = n.max(1) as f64;
    let values = grid.nodes().map(|t| integrated_intensity(events, g0, kernel, scale * t) / scale).collect();
    SampledFunction::new(grid.nodes().collect(), values)
}

/// Hawkes path as a [`PathBundle`]: `X = ∫λ`, `M^c = 0`, unit jumps at the
/// events, `M^d = N − X`, `Z = N`.
pub fn hawkes_bundle(events: &[f64], g0: &InputCurve, kernel: &KernelSpec, grid: &Grid) -> PathBundle {
    let x: Vec<f64> = grid.nodes().map(|t| integrated_intensity(events, g0, kernel, t)).collect();
    let counts: Vec<f64> = grid.nodes().map(|t| events.partition_point(|&s| s <= t) as f64).collect();
    let md: Vec<f64> = counts.iter().zip(&x).map(|(n, x)| n - x).collect();
    PathBundle { grid: *grid, mc: vec![0.0; x.len()], jumps: events.iter().map(|&s| (s, 1.0)).collect(), z: counts, md, x }
}
