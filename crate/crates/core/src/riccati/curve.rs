use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex coefficient curve on `[0, T]`.
///
/// JSON: `{"constant": [re, im]}` or `{"table": {"t": [...], "values": [[re, im], ...]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    Constant(Complex64),
    /// Linear interpolation, constant beyond the ends.
    Table {
        t: Vec<f64>,
        values: Vec<Complex64>,
    },
}

impl Default for Curve {
    fn default() -> Self {
        Curve::zero()
    }
}

impl From<Complex64> for Curve {
    fn from(z: Complex64) -> Self {
        Curve::Constant(z)
    }
}

impl Curve {
    pub fn zero() -> Self {
        Curve::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn real(x: f64) -> Self {
        Curve::Constant(Complex64::new(x, 0.0))
    }

    pub fn imag(y: f64) -> Self {
        Curve::Constant(Complex64::new(0.0, y))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Curve::Constant(z) if !(z.re.is_finite() && z.im.is_finite()) => {
                Err(Error::InvalidParameter(format!("curve value {z} is not finite")))
            }
            Curve::Table { t, values } => {
                if t.is_empty() || t.len() != values.len() {
                    return Err(Error::InvalidParameter("curve table needs matching, nonempty t and values".into()));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter("curve table times must be strictly increasing".into()));
                }
                Ok(())
            }
            Curve::Constant(_) => Ok(()),
        }
    }

    pub fn at(&self, s: f64) -> Complex64 {
        match self {
            Curve::Constant(z) => *z,
            Curve::Table { t, values } => {
                if s <= t[0] {
                    return values[0];
                }
                let last = t.len() - 1;
                if s >= t[last] {
                    return values[last];
                }
                let j = t.partition_point(|&x| x <= s) - 1;
                let w = (s - t[j]) / (t[j + 1] - t[j]);
                values[j] + (values[j + 1] - values[j]) * w
            }
        }
    }

    /// Pointwise sum; tables are merged on the union of their knots.
    pub fn add(&self, other: &Curve) -> Curve {
        match (self, other) {
            (Curve::Constant(a), Curve::Constant(b)) => Curve::Constant(a + b),
            _ => {
                let knots = |c: &Curve| match c {
                    Curve::Table { t, .. } => t.clone(),
                    Curve::Constant(_) => Vec::new(),
                };
                let mut t = knots(self);
                t.extend(knots(other));
                t.sort_by(f64::total_cmp);
                t.dedup();
                let values = t.iter().map(|&s| self.at(s) + other.at(s)).collect();
                Curve::Table { t, values }
            }
        }
    }

    /// Breakpoints inside `[0, horizon]`, for pointwise checks.
    pub fn knots(&self, horizon: f64) -> Vec<f64> {
        match self {
            Curve::Constant(_) => Vec::new(),
            Curve::Table { t, .. } => t.iter().copied().filter(|&s| (0.0..=horizon).contains(&s)).collect(),
        }
    }
}
