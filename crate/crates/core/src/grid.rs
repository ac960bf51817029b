use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid `t_k = k · T / n` on `[0, T]`, node 0 included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid {
    horizon: f64,
    n_steps: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    horizon: f64,
    n_steps: usize,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid::new(raw.horizon, raw.n_steps)
    }
}

impl From<Grid> for RawGrid {
    fn from(g: Grid) -> Self {
        RawGrid { horizon: g.horizon, n_steps: g.n_steps }
    }
}

impl Grid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be positive".into()));
        }
        Ok(Grid { horizon, n_steps })
    }

    /// Grid with step `dt` on `[0, horizon]`; `horizon / dt` must be integral up to rounding.
    pub fn with_step(horizon: f64, dt: f64) -> Result<Self> {
        let n = (horizon / dt).round();
        if !(n >= 1.0) || ((n * dt - horizon).abs() > 1e-9 * horizon) {
            return Err(Error::InvalidGrid(format!("step {dt} does not divide horizon {horizon}")));
        }
        Grid::new(horizon, n as usize)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.node(k))
    }

    /// Same horizon, `factor` times more steps.
    pub fn refine(&self, factor: usize) -> Grid {
        Grid { horizon: self.horizon, n_steps: self.n_steps * factor.max(1) }
    }

    /// Index of the node equal to `t` (within 1e-9 relative), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt()).round();
        if k < 0.0 || k > self.n_steps as f64 {
            return None;
        }
        let k = k as usize;
        ((self.node(k) - t).abs() <= 1e-9 * self.horizon.max(1.0)).then_some(k)
    }
}
