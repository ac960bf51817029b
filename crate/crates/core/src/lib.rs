//! Numerical toolkit for affine stochastic Volterra equations
//!
//! ```text
//! X_t = G_0(t) + ∫_0^t K(t − s) Z_s ds
//! ```
//!
//! driven by a semimartingale `Z` whose characteristics `(bX, cX, ν(dζ)X)`
//! are affine in `X`, with kernels `K` that are only locally integrable
//! (possibly unbounded at the origin).
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: kernel families, exact cell integrals on uniform grids,
//!   resolvents of the first and second kind, and the Mittag-Leffler function.
//! - [`model`]: characteristic triplets, jump measures and admissible input curves.
//! - [`riccati`]: the complex Riccati–Volterra solver and the transform exponent.
//! - [`transforms`]: Fourier–Laplace transforms for the general case, Hawkes
//!   processes and the hyper-rough Heston model, plus Fourier pricing.
//! - [`simulate`]: Monte Carlo oracles (Hawkes thinning, multifactor lift).
//! - [`experiments`]: configuration, reports and the scripted studies driven by
//!   the `avolterra` command-line tool.
//!
//! ```
//! use affine_volterra::kernels::KernelSpec;
//!
//! let k = KernelSpec::Fractional { hurst: 0.5 };
//! assert!((k.eval(3.7).unwrap() - 1.0).abs() < 1e-15);
//! ```

// Parameter checks are written `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod grid;
pub mod kernels;
pub mod model;
pub mod numeric;
pub mod riccati;
pub mod sampled;
pub mod simulate;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::Grid;
pub use num_complex::Complex64;

// The guide chapters are compiled as doctests so the book cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/admissible_inputs.md")]
    mod admissible_inputs {}
    #[doc = include_str!("../../../book/src/riccati.md")]
    mod riccati {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
