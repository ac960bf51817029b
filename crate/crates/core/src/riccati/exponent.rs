use num_complex::Complex64;

use crate::error::Result;
use crate::kernels::KernelSpec;
use crate::model::InputCurve;
use crate::riccati::PsiPath;

/// Product integration of the piecewise-linear `F̂` through `psi.f_values()`
/// against a weight `w(u) = g(T − u)` given by its running integral `G` and
/// running first moment `M` (`∫_0^x s g(s) ds`).
fn against_reversed<G, M>(psi: &PsiPath, big_g: G, moment: M) -> Complex64
where
    G: Fn(f64) -> f64,
    M: Fn(f64) -> f64,
{
    let grid = psi.grid();
    let horizon = grid.horizon();
    let dt = grid.dt();
    let f = psi.f_values();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..grid.n_steps() {
        let (a, b) = (grid.node(j), grid.node(j + 1));
        // v = T − u runs over [T − b, T − a].
        let (va, vb) = (horizon - a, horizon - b);
        let w0 = big_g(va) - big_g(vb);
        // ∫ (u − a) w(u) du = (T − a) w0 − ∫ v g(v) dv
        let w1 = (horizon - a) * w0 - (moment(va) - moment(vb));
        let upper = w1 / dt;
        acc += f[j] * (w0 - upper) + f[j + 1] * upper;
    }
    acc
}

/// `∫_0^T F(T − s, ψ(T − s)) g_0(s) ds = ∫_0^T F(u, ψ(u)) g_0(T − u) du`.
pub fn transform_exponent(psi: &PsiPath, curve: &InputCurve, kernel: &KernelSpec) -> Result<Complex64> {
    psi.ensure_finite()?;
    Ok(against_reversed(psi, |x| curve.G0(kernel, x), |x| curve.g0_first_moment(kernel, x)))
}

/// `x0 ∫_0^T F + θ ∫_0^T ψ` for `AffineInK` inputs, `None` otherwise.
///
/// `∫_0^T ψ = ∫_0^T F(u) I(T − u) du` with `I = ∫K`, evaluated by the same
/// product rule as `F̂` integrates against the kernel antiderivative.
pub fn closed_form_exponent(psi: &PsiPath, curve: &InputCurve, kernel: &KernelSpec) -> Result<Option<Complex64>> {
    psi.ensure_finite()?;
    let InputCurve::AffineInK { x0, theta } = curve else {
        return Ok(None);
    };
    let int_f = crate::numeric::trapezoid_c(psi.f_values(), psi.grid().dt());
    let int_psi = against_reversed(psi, |x| kernel.double_integral(x), |x| 0.5 * (x * x * kernel.integral(x) - kernel.second_moment(x)));
    Ok(Some(*x0 * int_f + *theta * int_psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::model::{CharTriplet, JumpMeasure};
    use crate::riccati::{solve_riccati, Curve, RiccatiSpec, SolverOptions};

    #[test]
    fn zero_solution_has_zero_exponent() {
        let s = RiccatiSpec::new(Curve::zero(), Curve::zero(), Curve::zero(), CharTriplet::new(0.0, 0.1, JumpMeasure::None).unwrap());
        let k = KernelSpec::fractional(0.1);
        let p = solve_riccati(&s, &k, &Grid::new(1.0, 20).unwrap(), &SolverOptions::default()).unwrap();
        let c = InputCurve::AffineInK { x0: 0.1, theta: 0.3 };
        assert_eq!(transform_exponent(&p, &c, &k).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        let nu = JumpMeasure::Exponential { mass: 1.0, rate: 4.0 };
        let s = RiccatiSpec::new(
            Curve::Constant(Complex64::new(-0.8, 0.4)),
            Curve::imag(0.5),
            Curve::zero(),
            CharTriplet::new(-1.0, 0.2, nu).unwrap(),
        );
        let c = InputCurve::AffineInK { x0: 0.04, theta: 0.5 };
        for k in [KernelSpec::fractional(0.1), KernelSpec::fractional(-0.2), KernelSpec::exp_sum(&[(1.0, 2.0), (0.3, 20.0)])] {
            let p = solve_riccati(&s, &k, &Grid::new(1.0, 256).unwrap(), &SolverOptions::default()).unwrap();
            let q = transform_exponent(&p, &c, &k).unwrap();
            let cf = closed_form_exponent(&p, &c, &k).unwrap().unwrap();
            assert!((q - cf).norm() <= 1e-8 * q.norm(), "{k:?}: {q} vs {cf}");
        }
    }

    #[test]
    fn table_input_uses_its_own_antiderivative() {
        // g0 ≡ 1 represented two ways.
        let s = RiccatiSpec::new(Curve::imag(1.0), Curve::zero(), Curve::zero(), CharTriplet::new(-1.0, 0.5, JumpMeasure::None).unwrap());
        let k = KernelSpec::fractional(0.3);
        let p = solve_riccati(&s, &k, &Grid::new(1.0, 128).unwrap(), &SolverOptions::default()).unwrap();
        let a = transform_exponent(&p, &InputCurve::constant(1.0), &k).unwrap();
        let b = transform_exponent(&p, &InputCurve::NonDecreasingTable { t: vec![0.0], values: vec![1.0] }, &k).unwrap();
        assert!((a - b).norm() < 1e-14);
        assert_eq!(closed_form_exponent(&p, &InputCurve::NonDecreasingTable { t: vec![0.0], values: vec![1.0] }, &k).unwrap(), None);
    }
}
