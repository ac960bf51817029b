//! Monte Carlo oracles.
//!
//! Every path draws from its own ChaCha8 stream, selected by path index from
//! a single `u64` seed, so populations are reproducible bit for bit and
//! independent of the thread count.

mod functional;
mod hawkes;
mod lift;
mod stats;

pub use functional::{
    functional_exponent, functional_exponent_until, g0_left_sums, g0_on_grid, mc_functional, modulus_bound_check, modulus_of_continuity,
    path_moduli, ModulusCheck,
};
pub use hawkes::{hawkes_bundle, rescaled_integrated_intensity, simulate_hawkes, simulate_hawkes_path, simulate_hawkes_population};
pub use lift::{map_lift_paths, simulate_lift, LiftDiagnostics, LiftPath, LiftState};
pub use stats::{ks_exponential, ComplexEstimate, KsResult, RealEstimate};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grid::Grid;

/// Generator for `path` under `seed`.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// One simulated trajectory of the driving decomposition `Z = bX + M^c + M^d`,
/// sampled at the grid nodes, with the exact jump list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathBundle {
    pub grid: Grid,
    /// `X(t_k)`, non-decreasing.
    pub x: Vec<f64>,
    /// `M^c(t_k)`.
    pub mc: Vec<f64>,
    /// `(time, size)` of every jump of `Z`, in time order.
    pub jumps: Vec<(f64, f64)>,
    /// `M^d(t_k) = Σ_{τ ≤ t_k} ζ − (∫ζν) X(t_k)`.
    pub md: Vec<f64>,
    /// `Z(t_k) = b X(t_k) + M^c(t_k) + M^d(t_k)`.
    pub z: Vec<f64>,
}

impl PathBundle {
    /// Sum of jump sizes up to and including `t`.
    pub fn jump_sum(&self, t: f64) -> f64 {
        self.jumps.iter().take_while(|(s, _)| *s <= t).map(|(_, z)| z).sum()
    }

    pub fn terminal_x(&self) -> f64 {
        self.x[self.x.len() - 1]
    }
}
