//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Reference values come from oracles computed here (series, RK4, graded
//! quadrature) rather than from the library's own routines.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use affine_volterra::experiments::{run, Command, ExperimentReport, RunConfig};
use affine_volterra::kernels::{resolvent_first_kind, resolvent_second_kind, resolvent_second_kind_scaled, KernelSpec};
use affine_volterra::model::{Atom, CharTriplet, InputCurve, JumpMeasure};
use affine_volterra::riccati::{check_sign_condition, solve_riccati, Curve, RiccatiSpec};
use affine_volterra::simulate::{simulate_hawkes_population, ComplexEstimate};
use affine_volterra::transforms::{hawkes_transform, heston_cf_logprice, heston_joint_transform, HestonModel};
use affine_volterra::{Complex64, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

mod common;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within_time(o: Outcome, elapsed: Duration, limit: Option<f64>) -> Outcome {
    let secs = elapsed.as_secs_f64();
    match limit {
        Some(l) => outcome(o.pass && secs < l, format!("{}; runtime {secs:.1}s (limit {l}s)", o.detail)),
        None => outcome(o.pass, format!("{}; runtime {secs:.1}s", o.detail)),
    }
}

type Criterion = (&'static str, Option<f64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("resolvent identity", Some(5.0), resolvent_identity),
        ("mittag-leffler resolvent", None, mittag_leffler_resolvent),
        ("first-kind resolvent", None, first_kind_resolvent),
        ("riccati sign property", Some(30.0), sign_property),
        ("classical heston oracle", None, classical_heston),
        ("martingale identity", None, martingale),
        ("hawkes cross-validation", Some(60.0), hawkes),
        ("lift cross-validation", Some(300.0), lift),
        ("stability", None, stability),
        ("modulus bound", None, modulus),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = within_time(f(), start.elapsed(), *limit);
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn unit_grid(n: usize) -> Grid {
    Grid::new(1.0, n).unwrap()
}

/// Node residual `|R − K − K*R|` with a trapezoid convolution, for kernels
/// bounded at zero.
fn trapezoid_residual(k: &KernelSpec, r: &[f64], dt: f64) -> f64 {
    let kv: Vec<f64> = (0..r.len()).map(|j| k.eval(j as f64 * dt).unwrap()).collect();
    (1..r.len())
        .map(|n| {
            let mut conv = 0.5 * (kv[n] * r[0] + kv[0] * r[n]);
            for j in 1..n {
                conv += kv[n - j] * r[j];
            }
            (r[n] - kv[n] - dt * conv).abs()
        })
        .fold(0.0, f64::max)
}

fn resolvent_identity() -> Outcome {
    let grid = unit_grid(1000);
    let mut worst: f64 = 0.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, k, bounded) in [
        ("Constant{2}", KernelSpec::constant(2.0), true),
        ("ExpSum{(1,1)}", KernelSpec::exp_sum(&[(1.0, 1.0)]), true),
        ("Fractional{0.25}", KernelSpec::fractional(0.25), false),
    ] {
        let r = resolvent_second_kind(&k, &grid).unwrap();
        let mut res = r.residual();
        if bounded {
            res = res.max(trapezoid_residual(&k, r.values(), grid.dt()));
        }
        worst = worst.max(res);
        pass &= res <= 1e-3;
        parts.push(format!("{name} residual {res:.2e}"));
    }
    let r = resolvent_second_kind(&KernelSpec::constant(2.0), &grid).unwrap();
    let rel = grid
        .nodes()
        .enumerate()
        .map(|(k, t)| {
            let exact = 2.0 * (2.0 * t).exp();
            (r.value(k) - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    pass &= rel <= 1e-3;
    parts.push(format!("Constant{{2}} vs 2e^(2t) rel {rel:.2e}"));
    outcome(pass && worst <= 1e-3, parts.join(", "))
}

/// `E_{α,β}(z)` by its power series, adequate for `|z| ≤ 2`.
fn ml_series(alpha: f64, beta: f64, z: f64) -> f64 {
    (0..80).map(|k| z.powi(k) / gamma(alpha * k as f64 + beta)).sum()
}

fn mittag_leffler_resolvent() -> Outcome {
    let (alpha, lambda) = (0.75, 1.0);
    let grid = unit_grid(1000);
    let r = resolvent_second_kind_scaled(&KernelSpec::fractional(alpha - 0.5), lambda, &grid).unwrap();
    let mut worst: f64 = 0.0;
    for (k, t) in grid.nodes().enumerate() {
        if t < 0.1 - 1e-12 {
            continue;
        }
        let exact = lambda * t.powf(alpha - 1.0) * ml_series(alpha, alpha, lambda * t.powf(alpha));
        worst = worst.max((r.value(k) - exact).abs() / exact);
    }
    outcome(worst <= 1e-2, format!("sign +1, max rel error on [0.1, 1] {worst:.2e} (tol 1e-2)"))
}

/// `(K*L)(t)` for `K = t^{α−1}/Γ(α)` from the measure `L` through its
/// distribution function, on meshes graded to both endpoint singularities.
fn first_kind_convolution(alpha: f64, mass: &dyn Fn(f64) -> f64, t: f64, n: usize) -> f64 {
    let kern = |s: f64| s.powf(alpha - 1.0) / gamma(alpha);
    let kern_int = |s: f64| s.powf(alpha) / gamma(alpha + 1.0);
    let half = 0.5 * t;
    let mut acc = 0.0;
    // [0, t/2]: s = (x (t/2)^{1−α})^{1/(1−α)} makes L uniform in x.
    let p = 1.0 / (1.0 - alpha);
    let xmax = half.powf(1.0 - alpha);
    for j in 0..n {
        let (a, b) = ((j as f64 / n as f64 * xmax).powf(p), ((j + 1) as f64 / n as f64 * xmax).powf(p));
        let mid = (((j as f64 + 0.5) / n as f64) * xmax).powf(p);
        acc += kern(t - mid) * (mass(b) - mass(a));
    }
    // [t/2, t]: t − s = (y (t/2)^α)^{1/α} makes the kernel weight uniform in y.
    let q = 1.0 / alpha;
    let ymax = half.powf(alpha);
    for j in 0..n {
        let (u0, u1) = ((j as f64 / n as f64 * ymax).powf(q), ((j + 1) as f64 / n as f64 * ymax).powf(q));
        let (s0, s1) = (t - u1, t - u0);
        let density = (mass(s1) - mass(s0)) / (s1 - s0);
        acc += (kern_int(u1) - kern_int(u0)) * density;
    }
    acc
}

fn first_kind_resolvent() -> Outcome {
    let grid = unit_grid(1000);
    let mut pass = true;
    let mut parts = Vec::new();
    for h in [-0.2, 0.0, 0.3] {
        let k = KernelSpec::fractional(h);
        let l = resolvent_first_kind(&k, &grid).unwrap();
        let alpha = h + 0.5;
        let mut worst = l.residual();
        for i in 1..=20 {
            let t = i as f64 / 20.0;
            let ours = first_kind_convolution(alpha, &|s| l.mass(s), t, 4000);
            worst = worst.max((ours - 1.0).abs()).max((l.convolve(&k, t) - 1.0).abs());
        }
        pass &= worst <= 1e-3;
        parts.push(format!("H={h}: {worst:.2e}"));
    }
    outcome(pass, format!("max |K*L - 1| {} (tol 1e-3)", parts.join(", ")))
}

fn random_kernel(rng: &mut ChaCha8Rng) -> KernelSpec {
    match rng.random_range(0..4) {
        0 => KernelSpec::fractional(rng.random_range(-0.45..0.5)),
        1 => KernelSpec::constant(rng.random_range(0.1..3.0)),
        2 => {
            let n = rng.random_range(1..4);
            let terms: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.05..2.0), rng.random_range(0.0..20.0))).collect();
            KernelSpec::exp_sum(&terms)
        }
        _ => KernelSpec::shifted(KernelSpec::fractional(rng.random_range(-0.45..0.4)), rng.random_range(0.01..0.2)),
    }
}

fn random_jumps(rng: &mut ChaCha8Rng) -> JumpMeasure {
    match rng.random_range(0..3) {
        0 => JumpMeasure::None,
        1 => JumpMeasure::Exponential { mass: rng.random_range(0.01..2.0), rate: rng.random_range(1.0..6.0) },
        _ => {
            let n = rng.random_range(1..3);
            JumpMeasure::Atoms {
                atoms: (0..n).map(|_| Atom { site: rng.random_range(0.1..2.0), mass: rng.random_range(0.01..1.5) }).collect(),
            }
        }
    }
}

/// Coefficients on the boundary-or-inside of the admissible set.
fn random_spec(rng: &mut ChaCha8Rng) -> RiccatiSpec {
    let nu = random_jumps(rng);
    let (b, c) = (rng.random_range(-2.0..2.0), rng.random_range(0.0..1.0));
    let (r1, y1) = (rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0));
    let (r2, y2) = (rng.random_range(0.0..1.0), rng.random_range(-3.0..3.0));
    let (slack, y0) = (rng.random_range(0.0..2.0), rng.random_range(-5.0..5.0));
    let re0 = -0.5 * c * r1 * r1 - 0.5 * nu.second_moment() * r2 * r2 - slack;
    RiccatiSpec::new(
        Curve::Constant(Complex64::new(re0, y0)),
        Curve::Constant(Complex64::new(r1, y1)),
        Curve::Constant(Complex64::new(-r2, y2)),
        CharTriplet::new(b, c, nu).unwrap(),
    )
}

fn sign_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = unit_grid(200);
    let (mut worst, mut blowups, mut inadmissible) = (f64::NEG_INFINITY, 0, 0);
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let k = random_kernel(&mut rng);
        if !check_sign_condition(&spec, &grid) {
            inadmissible += 1;
        }
        let psi = solve_riccati(&spec, &k, &grid, &Default::default()).unwrap();
        if psi.blowup().is_some() {
            blowups += 1;
        }
        worst = worst.max(psi.max_re());
    }
    outcome(worst <= 1e-8 && blowups == 0 && inadmissible == 0, format!("100 specs, max Re psi {worst:.2e} (tol 1e-8), {blowups} blow-ups"))
}

fn classical_heston() -> Outcome {
    let grid = unit_grid(4096);
    let m = common::BASE.model();
    let mut worst: f64 = 0.0;
    for v in [0.5, 1.0, 2.0, 5.0] {
        let cf = heston_cf_logprice(&m, v, &grid, &Default::default()).unwrap();
        let oracle = common::BASE.rk4(Complex64::new(0.0, v), 1.0, 4096).exp();
        worst = worst.max((cf - oracle).norm() / oracle.norm());
    }
    outcome(worst <= 1e-6, format!("v in {{0.5, 1, 2, 5}}, max rel error vs RK4 {worst:.2e} (tol 1e-6)"))
}

fn martingale() -> Outcome {
    let kernels = [
        KernelSpec::constant(1.0),
        KernelSpec::fractional(0.1),
        KernelSpec::fractional(-0.2),
        KernelSpec::exp_sum(&[(0.3, 0.1), (1.0, 2.0), (3.6, 45.0)]),
        KernelSpec::shifted(KernelSpec::fractional(-0.3), 0.05),
    ];
    let nus = [JumpMeasure::None, JumpMeasure::Exponential { mass: 1.0, rate: 4.0 }];
    let grid = unit_grid(256);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in &kernels {
        for nu in &nus {
            let m = HestonModel {
                s0: 2.5,
                rho: -0.7,
                kernel: k.clone(),
                curve: InputCurve::AffineInK { x0: 0.04, theta: 0.08 },
                triplet: CharTriplet::new(-2.0, 0.09, nu.clone()).unwrap(),
            };
            let v = heston_joint_transform(&m, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), &grid, &Default::default()).unwrap();
            worst = worst.max((v / m.s0 - 1.0).norm());
            count += 1;
        }
    }
    outcome(worst <= 1e-12, format!("{count} models, max |E[S_T]/S_0 - 1| {worst:.2e} (tol 1e-12)"))
}

fn hawkes() -> Outcome {
    let k = KernelSpec::exp_sum(&[(0.5, 1.0)]);
    let g0 = InputCurve::constant(1.0);
    let t = 2.0;
    let pop = simulate_hawkes_population(&g0, &k, t, 1, 100_000).unwrap();
    let grid = Grid::new(t, 2000).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0] {
        let exact = hawkes_transform(&Curve::zero(), &Curve::imag(a), &g0, &k, &grid, &Default::default()).unwrap();
        let z: Vec<Complex64> = pop.iter().map(|e| Complex64::new(0.0, a * e.len() as f64).exp()).collect();
        let mc = ComplexEstimate::from_samples(&z);
        pass &= mc.within(exact, 3.0);
        parts.push(format!("a={a}: z_re {:.2}, z_im {:.2}", (mc.mean.re - exact.re) / mc.se_re, (mc.mean.im - exact.im) / mc.se_im));
    }
    outcome(pass, format!("1e5 paths, {} (tol 3 SE)", parts.join(", ")))
}

fn checked_rows(report: &ExperimentReport, prefix: &str) -> (bool, Vec<String>) {
    let rows: Vec<_> = report.rows.iter().filter(|r| r.pass.is_some() && r.case.starts_with(prefix)).collect();
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass == Some(true));
    let text = rows
        .iter()
        .map(|r| match (r.reference, r.std_error) {
            (Some(reference), Some(se)) if se > 0.0 => format!("{} {} z {:.2}", r.case, r.metric, (r.value - reference) / se),
            (Some(reference), _) => format!("{} {} {:.3e} vs {:.3e}", r.case, r.metric, r.value, reference),
            _ => format!("{} {} {}", r.case, r.metric, if r.pass == Some(true) { "ok" } else { "failed" }),
        })
        .collect();
    (pass, text)
}

fn lift() -> Outcome {
    let report = run(Command::LiftValidate, &RunConfig::default()).unwrap();
    let (pass, text) = checked_rows(&report, "cf_v=");
    outcome(pass, format!("3-factor lift, 1e5 paths, dt 1/500: {} (tol 3 SE)", text.join(", ")))
}

fn stability() -> Outcome {
    let report = run(Command::Stability, &RunConfig::default()).unwrap();
    let (pass, text) = checked_rows(&report, "fractional_h=");
    outcome(pass && report.passed(), text.join(", "))
}

fn modulus() -> Outcome {
    let report = run(Command::ModulusCheck, &RunConfig::default()).unwrap();
    let (pass, text) = checked_rows(&report, "delta=");
    let lines: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.case.starts_with("delta="))
        .map(|r| format!("{} lhs {:.4} <= rhs {:.4}", r.case, r.value, r.reference.unwrap_or(f64::NAN)))
        .collect();
    outcome(pass && text.len() == 3, lines.join(", "))
}

fn determinism() -> Outcome {
    let cfg = RunConfig::from_json(
        r#"{"simulation": {"n_paths": 300, "seed": 99, "dump_paths": 1},
            "experiment": {"sim_steps": 100, "scaling": {"n_paths": 300}}}"#,
    )
    .unwrap();
    let mut differing = Vec::new();
    for c in Command::ALL {
        let a = run(c, &cfg).unwrap();
        let b = run(c, &cfg).unwrap();
        let same = a.to_csv().unwrap() == b.to_csv().unwrap()
            && a.artifacts.len() == b.artifacts.len()
            && a.artifacts.iter().zip(&b.artifacts).all(|(x, y)| x.name == y.name && x.contents == y.contents);
        if !same {
            differing.push(c.name());
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} subcommands re-run, differing: {}",
            Command::ALL.len(),
            if differing.is_empty() { "none".into() } else { differing.join(" ") }
        ),
    )
}
