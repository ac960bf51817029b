use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::numeric::adaptive_simpson;

/// `∫_0^T |a(t) − b(t)| dt`.
///
/// On each grid cell where the difference keeps one sign the integral is the
/// exact difference of antiderivatives, so shared singularities at the origin
/// cost nothing. Cells where the sign flips fall back to adaptive Simpson.
pub fn l1_distance(a: &KernelSpec, b: &KernelSpec, grid: &Grid) -> f64 {
    if a == b {
        return 0.0;
    }
    let diff = |t: f64| a.eval(t).unwrap_or(f64::INFINITY) - b.eval(t).unwrap_or(f64::INFINITY);
    let mut total = 0.0;
    for j in 0..grid.n_steps() {
        let (lo, hi) = (grid.node(j), grid.node(j + 1));
        let h = hi - lo;
        let probes = [1e-9, 1e-4, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
        let mut pos = false;
        let mut neg = false;
        for p in probes {
            let d = diff(lo + p * h);
            // inf − inf near a shared singularity carries no sign information.
            if d.is_nan() {
                continue;
            }
            pos |= d > 0.0;
            neg |= d < 0.0;
        }
        let exact = a.cell_integral(lo, hi) - b.cell_integral(lo, hi);
        total += if pos && neg {
            // The first point of a singular cell is never sampled by Simpson's rule
            // when it starts at the origin, so nudge it.
            let start = if lo == 0.0 { 1e-12 * h } else { lo };
            adaptive_simpson(&|t| diff(t).abs(), start, hi, 1e-12 * (1.0 + exact.abs()))
        } else {
            exact.abs()
        };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_kernels_are_at_distance_zero() {
        let g = Grid::new(1.0, 10).unwrap();
        let k = KernelSpec::fractional(0.1);
        assert_eq!(l1_distance(&k, &k, &g), 0.0);
    }

    #[test]
    fn constants() {
        let g = Grid::new(1.0, 7).unwrap();
        let d = l1_distance(&KernelSpec::constant(1.0), &KernelSpec::constant(2.0), &g);
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shift_distance_decreases_and_matches_antiderivatives() {
        let g = Grid::new(1.0, 64).unwrap();
        let k = KernelSpec::fractional(0.1);
        let mut last = f64::INFINITY;
        for n in [4.0, 16.0, 64.0, 256.0] {
            let h = 1.0 / n;
            let d = l1_distance(&k, &KernelSpec::shifted(k.clone(), h), &g);
            // K ≥ Δ_hK, so the distance is I(T) − (I(T+h) − I(h)).
            let exact = k.integral(1.0) - (k.integral(1.0 + h) - k.integral(h));
            assert!((d - exact).abs() < 1e-12, "h={h}");
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn crossing_kernels_use_the_absolute_value() {
        // 2e^{−2t} and 1 cross at t = ln 2 / 2.
        let g = Grid::new(1.0, 3).unwrap();
        let d = l1_distance(&KernelSpec::exp_sum(&[(2.0, 2.0)]), &KernelSpec::constant(1.0), &g);
        let tc = 0.5 * 2f64.ln();
        let f = |t: f64| -(-2.0 * t).exp() - t;
        let exact = (f(tc) - f(0.0)) - (f(1.0) - f(tc));
        assert!((d - exact).abs() < 1e-9, "{d} vs {exact}");
    }
}
