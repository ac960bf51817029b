//! Classical Heston oracles shared by the integration tests.
#![allow(dead_code)]

use affine_volterra::kernels::KernelSpec;
use affine_volterra::model::{CharTriplet, InputCurve, JumpMeasure};
use affine_volterra::transforms::HestonModel;
use affine_volterra::Complex64;

#[derive(Clone, Copy)]
pub struct Classical {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub rho: f64,
    pub v0: f64,
}

impl Classical {
    pub fn model(&self) -> HestonModel {
        HestonModel {
            s0: 1.0,
            rho: self.rho,
            kernel: KernelSpec::constant(1.0),
            curve: InputCurve::AffineInK { x0: self.v0, theta: self.kappa * self.theta },
            triplet: CharTriplet::new(-self.kappa, self.sigma * self.sigma, JumpMeasure::None).unwrap(),
        }
    }

    /// `ψ' = ½(h² − h) + (ρσh − κ)ψ + ½σ²ψ²`, `Ψ' = ψ`, by RK4; returns
    /// `v0 ψ(T) + κθ Ψ(T)`.
    pub fn rk4(&self, h: Complex64, horizon: f64, n: usize) -> Complex64 {
        let rhs = |p: Complex64| 0.5 * (h * h - h) + (self.rho * self.sigma * h - self.kappa) * p + 0.5 * self.sigma * self.sigma * p * p;
        let dt = horizon / n as f64;
        let (mut p, mut q) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for _ in 0..n {
            let k1 = rhs(p);
            let k2 = rhs(p + 0.5 * dt * k1);
            let k3 = rhs(p + 0.5 * dt * k2);
            let k4 = rhs(p + dt * k3);
            let l1 = p;
            let l2 = p + 0.5 * dt * k1;
            let l3 = p + 0.5 * dt * k2;
            let l4 = p + dt * k3;
            p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            q += dt / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        }
        self.v0 * p + self.kappa * self.theta * q
    }

    /// Closed-form characteristic function of `log S_T` (`S_0 = 1`).
    pub fn closed_form(&self, u: f64, horizon: f64) -> Complex64 {
        let i = Complex64::i();
        let (k, s) = (self.kappa, self.sigma);
        let beta = k - self.rho * s * i * u;
        let d = (beta * beta + s * s * (i * u + u * u)).sqrt();
        let g = (beta - d) / (beta + d);
        let e = (-d * horizon).exp();
        let c = k * self.theta / (s * s) * ((beta - d) * horizon - 2.0 * ((1.0 - g * e) / (1.0 - g)).ln());
        let dd = (beta - d) / (s * s) * (1.0 - e) / (1.0 - g * e);
        (c + dd * self.v0).exp()
    }
}

pub const BASE: Classical = Classical { kappa: 2.0, theta: 0.04, sigma: 0.3, rho: -0.7, v0: 0.04 };

/// The ψ path itself, with `h0 X_T` entering as a constant source term.
pub fn rk4_with_source(p: &Classical, h0: f64, h: Complex64, horizon: f64, n: usize) -> Vec<Complex64> {
    let rhs = |q: Complex64| h0 + 0.5 * (h * h - h) + (p.rho * p.sigma * h - p.kappa) * q + 0.5 * p.sigma * p.sigma * q * q;
    let dt = horizon / n as f64;
    let mut q = Complex64::new(0.0, 0.0);
    let mut nodes = vec![q];
    for _ in 0..n {
        let k1 = rhs(q);
        let k2 = rhs(q + 0.5 * dt * k1);
        let k3 = rhs(q + 0.5 * dt * k2);
        let k4 = rhs(q + dt * k3);
        q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        nodes.push(q);
    }
    nodes
}
