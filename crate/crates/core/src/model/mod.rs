//! Affine characteristics `(bX, cX, ν X)` of the driving semimartingale and
//! admissible input curves `G_0`.

mod input;
mod jumps;

pub use input::{admissibility_residual, admissibility_residual_with, InputCurve, ADMISSIBILITY_TOLERANCE};
pub use jumps::{Atom, JumpMeasure};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drift `b`, diffusion `c ≥ 0` and jump intensity `ν` per unit of `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharTriplet {
    pub b: f64,
    pub c: f64,
    #[serde(default)]
    pub nu: JumpMeasure,
}

impl CharTriplet {
    pub fn new(b: f64, c: f64, nu: JumpMeasure) -> Result<Self> {
        let t = CharTriplet { b, c, nu };
        t.validate()?;
        Ok(t)
    }

    /// Hawkes triplet `(1, 0, δ₁)`.
    pub fn hawkes() -> Self {
        CharTriplet { b: 1.0, c: 0.0, nu: JumpMeasure::Atoms { atoms: vec![Atom { site: 1.0, mass: 1.0 }] } }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be finite, got {}", self.b)));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be nonnegative, got {}", self.c)));
        }
        self.nu.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_rejection() {
        let t: CharTriplet = serde_json::from_str(r#"{"b":-2,"c":0.09,"nu":{"type":"exponential","mass":1,"rate":4}}"#).unwrap();
        assert_eq!(t.nu, JumpMeasure::Exponential { mass: 1.0, rate: 4.0 });
        let plain: CharTriplet = serde_json::from_str(r#"{"b":1,"c":0}"#).unwrap();
        assert_eq!(plain.nu, JumpMeasure::None);
        assert!(serde_json::from_str::<CharTriplet>(r#"{"b":1,"c":0,"sigma":1}"#).is_err());
        assert!(CharTriplet::new(0.0, -1.0, JumpMeasure::None).is_err());
    }
}
