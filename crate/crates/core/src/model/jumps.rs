use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::exp_m1_m_id;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub site: f64,
    pub mass: f64,
}

/// Jump measure `ν` on `(0, ∞)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpMeasure {
    #[default]
    None,
    /// `Σ mᵢ δ_{ζᵢ}`.
    Atoms { atoms: Vec<Atom> },
    /// `m ρ e^{−ρζ} dζ`: total mass `m`, exponential sizes with mean `1/ρ`.
    Exponential { mass: f64, rate: f64 },
}

impl JumpMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpMeasure::None => Ok(()),
            JumpMeasure::Atoms { atoms } => {
                for a in atoms {
                    if !(a.site > 0.0 && a.site.is_finite() && a.mass > 0.0 && a.mass.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "jump atoms need positive site and mass, got ({}, {})",
                            a.site, a.mass
                        )));
                    }
                }
                Ok(())
            }
            JumpMeasure::Exponential { mass, rate } => {
                if !(*mass > 0.0 && mass.is_finite() && *rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidParameter(format!("exponential jumps need positive mass and rate, got ({mass}, {rate})")));
                }
                Ok(())
            }
        }
    }

    /// `ν(ℝ₊)`.
    pub fn total_mass(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Atoms { atoms } => atoms.iter().map(|a| a.mass).sum(),
            JumpMeasure::Exponential { mass, .. } => *mass,
        }
    }

    /// `∫ζ ν(dζ)`.
    pub fn first_moment(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Atoms { atoms } => atoms.iter().map(|a| a.mass * a.site).sum(),
            JumpMeasure::Exponential { mass, rate } => mass / rate,
        }
    }

    /// `∫ζ² ν(dζ)`.
    pub fn second_moment(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Atoms { atoms } => atoms.iter().map(|a| a.mass * a.site * a.site).sum(),
            JumpMeasure::Exponential { mass, rate } => 2.0 * mass / (rate * rate),
        }
    }

    /// `J(z) = ∫(e^{zζ} − 1 − zζ) ν(dζ)`.
    pub fn exp_integral(&self, z: Complex64) -> Result<Complex64> {
        match self {
            JumpMeasure::None => Ok(Complex64::new(0.0, 0.0)),
            JumpMeasure::Atoms { atoms } => Ok(atoms.iter().map(|a| a.mass * exp_m1_m_id(z * a.site)).sum()),
            JumpMeasure::Exponential { mass, rate } => {
                self.check_domain(z)?;
                // m(ρ/(ρ−z) − 1 − z/ρ) = m z² / (ρ(ρ − z))
                Ok(*mass * z * z / (*rate * (*rate - z)))
            }
        }
    }

    /// `J'(z) = ∫ζ(e^{zζ} − 1) ν(dζ)`.
    pub fn exp_integral_derivative(&self, z: Complex64) -> Result<Complex64> {
        match self {
            JumpMeasure::None => Ok(Complex64::new(0.0, 0.0)),
            JumpMeasure::Atoms { atoms } => Ok(atoms.iter().map(|a| a.mass * a.site * crate::numeric::exp_m1(z * a.site)).sum()),
            JumpMeasure::Exponential { mass, rate } => {
                self.check_domain(z)?;
                let d = *rate - z;
                Ok(*mass * (*rate / (d * d) - 1.0 / *rate))
            }
        }
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if let JumpMeasure::Exponential { rate, .. } = self {
            if !(z.re < *rate) {
                return Err(Error::JumpDomain { re: z.re, im: z.im, rate: *rate });
            }
        }
        Ok(())
    }

    /// Draw one jump size from `ν / ν(ℝ₊)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Atoms { atoms } => {
                let mut u = rng.random::<f64>() * self.total_mass();
                for a in atoms {
                    if u < a.mass {
                        return a.site;
                    }
                    u -= a.mass;
                }
                atoms.last().map_or(0.0, |a| a.site)
            }
            JumpMeasure::Exponential { rate, .. } => Exp::new(*rate).expect("validated rate").sample(rng),
        }
    }
}
