use num_complex::Complex64;
use serde::Serialize;

use crate::numeric::Compensated;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl RealEstimate {
    /// Compensated mean and unbiased variance, summed in slice order.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return RealEstimate { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = xs.iter().copied().collect::<Compensated>().value() / n as f64;
        let ss = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<Compensated>().value();
        let se = if n > 1 { (ss / ((n - 1) as f64) / n as f64).sqrt() } else { f64::INFINITY };
        RealEstimate { mean, se, n }
    }

    /// `|mean − target| ≤ k · SE`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }

    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }
}

/// Componentwise estimate of a complex mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: usize,
}

impl ComplexEstimate {
    pub fn from_samples(zs: &[Complex64]) -> Self {
        let re: Vec<f64> = zs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = zs.iter().map(|z| z.im).collect();
        let (r, i) = (RealEstimate::from_samples(&re), RealEstimate::from_samples(&im));
        ComplexEstimate { mean: Complex64::new(r.mean, i.mean), se_re: r.se, se_im: i.se, n: zs.len() }
    }

    pub fn re(&self) -> RealEstimate {
        RealEstimate { mean: self.mean.re, se: self.se_re, n: self.n }
    }

    pub fn im(&self) -> RealEstimate {
        RealEstimate { mean: self.mean.im, se: self.se_im, n: self.n }
    }

    /// Both components within `k` standard errors of the target.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        self.re().within(target.re, k) && self.im().within(target.im, k)
    }

    /// `√(se_re² + se_im²)`.
    pub fn se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

/// One-sample Kolmogorov–Smirnov test against `Exp(rate)` at level 0.01,
/// using the asymptotic critical value `1.628 / √n`.
pub fn ks_exponential(samples: &[f64], rate: f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let cdf = -(-rate * x).exp_m1();
        d = d.max((i as f64 + 1.0) / n - cdf).max(cdf - i as f64 / n);
    }
    let critical = 1.628 / n.sqrt();
    KsResult { statistic: d, critical, pass: d <= critical }
}
