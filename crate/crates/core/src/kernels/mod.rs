//! Convolution kernels, their exact cell integrals, and resolvents.
//!
//! Every family here is nonnegative and non-increasing on `(0, ∞)`. The
//! fractional and gamma families with `H ≤ 0` are unbounded at `0+` but stay
//! locally integrable, so quadrature never samples them near the origin:
//! all discretizations go through the exact antiderivative
//! [`KernelSpec::integral`] and the first moment [`KernelSpec::first_moment`].

mod distance;
mod fit;
mod mittag_leffler;
mod quad;
mod resolvent;

pub use distance::l1_distance;
pub use fit::{fit_fractional_exp_sum, ExpSumFit};
pub use mittag_leffler::{mittag_leffler, MittagLefflerOptions};
pub use quad::QuadWeights;
pub use resolvent::{
    resolvent_first_kind, resolvent_second_kind, resolvent_second_kind_scaled, FirstKindDensity, ResolventFirstKind, ResolventSecondKind,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, gamma, gamma_p};

/// One `weight · e^{−rate · t}` term of an exponential sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

impl ExpTerm {
    pub fn new(weight: f64, rate: f64) -> Self {
        ExpTerm { weight, rate }
    }
}

/// Symbolic kernel description.
///
/// JSON form is internally tagged, e.g. `{"type": "fractional", "H": 0.1}` or
/// `{"type": "shifted", "base": {"type": "constant", "value": 1.0}, "h": 0.25}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `t^{H−1/2} / Γ(H + 1/2)`, `H ∈ (−1/2, 1/2]`.
    Fractional {
        #[serde(rename = "H")]
        hurst: f64,
    },
    /// `t^{H−1/2} e^{−η t} / Γ(H + 1/2)`.
    Gamma {
        #[serde(rename = "H")]
        hurst: f64,
        eta: f64,
    },
    Constant {
        value: f64,
    },
    /// `Σ wᵢ e^{−γᵢ t}`.
    ExpSum {
        terms: Vec<ExpTerm>,
    },
    /// `base(t + h)`.
    Shifted {
        base: Box<KernelSpec>,
        h: f64,
    },
}

impl KernelSpec {
    pub fn fractional(hurst: f64) -> Self {
        KernelSpec::Fractional { hurst }
    }

    pub fn constant(value: f64) -> Self {
        KernelSpec::Constant { value }
    }

    pub fn exp_sum(terms: &[(f64, f64)]) -> Self {
        KernelSpec::ExpSum { terms: terms.iter().map(|&(w, r)| ExpTerm::new(w, r)).collect() }
    }

    pub fn shifted(base: KernelSpec, h: f64) -> Self {
        KernelSpec::Shifted { base: Box::new(base), h }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidKernel(msg));
        match self {
            KernelSpec::Fractional { hurst } | KernelSpec::Gamma { hurst, .. } if !(*hurst > -0.5 && *hurst <= 0.5) => {
                bad(format!("H must lie in (-1/2, 1/2], got {hurst}"))
            }
            KernelSpec::Gamma { eta, .. } if !(*eta >= 0.0 && eta.is_finite()) => bad(format!("eta must be nonnegative, got {eta}")),
            KernelSpec::Constant { value } if !(*value >= 0.0 && value.is_finite()) => {
                bad(format!("constant kernel must be nonnegative, got {value}"))
            }
            KernelSpec::ExpSum { terms } => {
                for t in terms {
                    if !(t.weight > 0.0 && t.weight.is_finite()) {
                        return bad(format!("exp-sum weight must be positive, got {}", t.weight));
                    }
                    if !(t.rate >= 0.0 && t.rate.is_finite()) {
                        return bad(format!("exp-sum rate must be nonnegative, got {}", t.rate));
                    }
                }
                Ok(())
            }
            KernelSpec::Shifted { base, h } => {
                if !(*h > 0.0 && h.is_finite()) {
                    return bad(format!("shift must be positive, got {h}"));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    /// `α = H + 1/2` for the power-law families.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            KernelSpec::Fractional { hurst } | KernelSpec::Gamma { hurst, .. } => Some(hurst + 0.5),
            _ => None,
        }
    }

    /// True when `K(0+) = ∞`.
    pub fn is_singular_at_zero(&self) -> bool {
        self.alpha().is_some_and(|a| a < 1.0)
    }

    /// `K(0)` when the kernel is bounded at the origin.
    pub fn value_at_zero(&self) -> Option<f64> {
        match self {
            _ if self.is_singular_at_zero() => None,
            KernelSpec::Fractional { .. } | KernelSpec::Gamma { .. } => Some(1.0),
            KernelSpec::Constant { value } => Some(*value),
            KernelSpec::ExpSum { terms } => Some(terms.iter().map(|t| t.weight).sum()),
            KernelSpec::Shifted { base, h } => base.eval(*h).ok(),
        }
    }

    /// Pointwise value `K(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::KernelDomain { t });
        }
        if t == 0.0 {
            return self.value_at_zero().ok_or(Error::KernelDomain { t });
        }
        Ok(match self {
            KernelSpec::Fractional { hurst } => {
                let a = hurst + 0.5;
                t.powf(a - 1.0) / gamma(a)
            }
            KernelSpec::Gamma { hurst, eta } => {
                let a = hurst + 0.5;
                t.powf(a - 1.0) * (-eta * t).exp() / gamma(a)
            }
            KernelSpec::Constant { value } => *value,
            KernelSpec::ExpSum { terms } => terms.iter().map(|e| e.weight * (-e.rate * t).exp()).sum(),
            KernelSpec::Shifted { base, h } => base.eval(t + h)?,
        })
    }

    /// `∫_0^t K(u) du`.
    pub fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Fractional { hurst } => {
                let a = hurst + 0.5;
                t.powf(a) / gamma(a + 1.0)
            }
            KernelSpec::Gamma { hurst, eta } => {
                let a = hurst + 0.5;
                if *eta == 0.0 {
                    t.powf(a) / gamma(a + 1.0)
                } else {
                    eta.powf(-a) * gamma_p(a, eta * t)
                }
            }
            KernelSpec::Constant { value } => value * t,
            KernelSpec::ExpSum { terms } => {
                terms.iter().map(|e| if e.rate == 0.0 { e.weight * t } else { -e.weight * (-e.rate * t).exp_m1() / e.rate }).sum()
            }
            KernelSpec::Shifted { base, h } => base.integral(t + h) - base.integral(*h),
        }
    }

    /// `∫_0^t u K(u) du`.
    pub fn first_moment(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Fractional { hurst } => {
                let a = hurst + 0.5;
                a * t.powf(a + 1.0) / gamma(a + 2.0)
            }
            KernelSpec::Gamma { hurst, eta } => {
                let a = hurst + 0.5;
                if *eta == 0.0 {
                    a * t.powf(a + 1.0) / gamma(a + 2.0)
                } else {
                    a * eta.powf(-a - 1.0) * gamma_p(a + 1.0, eta * t)
                }
            }
            KernelSpec::Constant { value } => 0.5 * value * t * t,
            KernelSpec::ExpSum { terms } => terms
                .iter()
                .map(|e| {
                    if e.rate == 0.0 {
                        0.5 * e.weight * t * t
                    } else {
                        e.weight * one_minus_exp_times_affine(e.rate * t) / (e.rate * e.rate)
                    }
                })
                .sum(),
            KernelSpec::Shifted { base, h } => (base.first_moment(t + h) - base.first_moment(*h)) - h * self.integral(t),
        }
    }

    /// `∫_0^t u² K(u) du`.
    pub fn second_moment(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Fractional { hurst } | KernelSpec::Gamma { hurst, eta: 0.0 } => {
                let a = hurst + 0.5;
                a * (a + 1.0) * t.powf(a + 2.0) / gamma(a + 3.0)
            }
            KernelSpec::Gamma { hurst, eta } => {
                let a = hurst + 0.5;
                a * (a + 1.0) * eta.powf(-a - 2.0) * gamma_p(a + 2.0, eta * t)
            }
            KernelSpec::Constant { value } => value * t * t * t / 3.0,
            KernelSpec::ExpSum { terms } => terms
                .iter()
                .map(|e| if e.rate == 0.0 { e.weight * t * t * t / 3.0 } else { e.weight * lower_gamma_3(e.rate * t) / e.rate.powi(3) })
                .sum(),
            KernelSpec::Shifted { base, h } => {
                // ∫_h^{t+h} (v − h)² base(v) dv
                let d = |f: fn(&KernelSpec, f64) -> f64| f(base, t + h) - f(base, *h);
                d(KernelSpec::second_moment) - 2.0 * h * d(KernelSpec::first_moment) + h * h * d(KernelSpec::integral)
            }
        }
    }

    /// `∫_0^t ∫_0^s K(u) du ds = t·I(t) − M₁(t)`.
    pub fn double_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Fractional { hurst } => {
                let a = hurst + 0.5;
                t.powf(a + 1.0) / gamma(a + 2.0)
            }
            KernelSpec::Constant { value } => 0.5 * value * t * t,
            _ => t * self.integral(t) - self.first_moment(t),
        }
    }

    /// `∫_a^b K(u) du` for `0 ≤ a ≤ b`.
    pub fn cell_integral(&self, a: f64, b: f64) -> f64 {
        self.integral(b) - self.integral(a)
    }

    /// Self-convolution `(K * K)(t)`; closed form for every family except `Shifted`.
    pub fn self_convolution(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Fractional { hurst } => {
                let a = hurst + 0.5;
                t.powf(2.0 * a - 1.0) / gamma(2.0 * a)
            }
            KernelSpec::Gamma { hurst, eta } => {
                let a = hurst + 0.5;
                (-eta * t).exp() * t.powf(2.0 * a - 1.0) / gamma(2.0 * a)
            }
            KernelSpec::Constant { value } => value * value * t,
            KernelSpec::ExpSum { terms } => {
                let mut acc = 0.0;
                for p in terms {
                    for q in terms {
                        let d = p.rate - q.rate;
                        // ∫_0^t e^{−p(t−s)} e^{−q s} ds
                        let v = if d.abs() * t < 1e-12 { t * (-p.rate * t).exp() } else { (-q.rate * t).exp() * (-(-d * t).exp_m1()) / d };
                        acc += p.weight * q.weight * v;
                    }
                }
                acc
            }
            KernelSpec::Shifted { .. } => {
                let f = |s: f64| self.eval(t - s).unwrap_or(0.0) * self.eval(s).unwrap_or(0.0);
                adaptive_simpson(&f, 0.0, t, 1e-13 * (1.0 + self.integral(t).powi(2)))
            }
        }
    }
}

/// `∫_0^x v² e^{−v} dv`, stable for small `x`.
fn lower_gamma_3(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{k≥0} (−1)^k x^{k+3} / (k! (k+3))
        let mut p = x * x * x;
        let mut sum = p / 3.0;
        for k in 1..30 {
            p *= -x / k as f64;
            sum += p / (k + 3) as f64;
        }
        sum
    } else {
        2.0 - (-x).exp() * (x * x + 2.0 * x + 2.0)
    }
}

/// `1 − e^{−x}(1 + x)`, stable for small `x`.
fn one_minus_exp_times_affine(x: f64) -> f64 {
    if x < 0.1 {
        // Σ_{k≥2} (−1)^k (k−1) x^k / k!
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..25 {
            term *= -x / k as f64;
            sum += term * (k - 1) as f64;
        }
        sum
    } else {
        1.0 - (-x).exp() * (1.0 + x)
    }
}
