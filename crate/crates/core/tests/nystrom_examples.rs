use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use nystrom_core::adaptive::{integrate, AdaptiveOptions};
use nystrom_core::linalg::{lu_solve, Matrix};
use nystrom_core::newton::{max_norm, NonlinearSystem};
use nystrom_core::nystrom::{assemble_system, relative_error, solve, HammersteinProblem, Nemytskii, SecondKernel};
use nystrom_core::singular_moments::SingularKernel;
use nystrom_core::QuadratureRule;
use proptest::prelude::*;

fn cubic() -> Nemytskii {
    Nemytskii::with_derivative(Arc::new(|_, v| v * v * v), Arc::new(|_, v| 3.0 * v * v))
}

fn example1() -> HammersteinProblem {
    let e = 1f64.exp();
    HammersteinProblem::new(
        SecondKernel::Smooth(Arc::new(|x, y| (y - 2.0 * x).exp())),
        cubic(),
        Arc::new(move |y| (y - 1.0).exp() * (e - e * e + 1.0)),
    )
}

fn example2() -> HammersteinProblem {
    HammersteinProblem::new(
        SecondKernel::Smooth(Arc::new(|x, y| y * (PI * x / 2.0).cos())),
        Nemytskii::with_derivative(Arc::new(|_, v| v.exp()), Arc::new(|_, v| v.exp())),
        Arc::new(|y| (PI * y / 2.0).sin() - 4.0 * y / PI * 1f64.sinh()),
    )
}

// right-hand side on [0,1] whose solution is sqrt(x(1-x))
fn example7_g(y: f64) -> f64 {
    let z = 1.0 - y;
    (y * z).sqrt() + 16.0 / 15.0 * y.powf(2.5) + 2.0 * y * y * z.sqrt()
        + 4.0 / 3.0 * y * z.powf(1.5)
        + 0.4 * z.powf(2.5)
        - 4.0 / 3.0 * y.powf(1.5)
        - 2.0 * y * z.sqrt()
        - 2.0 / 3.0 * z.powf(1.5)
}

fn example7() -> HammersteinProblem {
    let kernel = SingularKernel::algebraic(-0.5, Arc::new(|_| FRAC_1_SQRT_2)).unwrap();
    HammersteinProblem::new(
        SecondKernel::Singular(kernel),
        Nemytskii::with_derivative(Arc::new(|_, v| v * v), Arc::new(|_, v| 2.0 * v)),
        Arc::new(|s| example7_g(0.5 * (s + 1.0))),
    )
    .with_initial_guess(Arc::new(|_| 0.5))
}

fn example9() -> HammersteinProblem {
    HammersteinProblem::new(
        SecondKernel::Singular(SingularKernel::algebraic(-0.5, Arc::new(|_| 1.0)).unwrap()),
        Nemytskii::with_derivative(
            Arc::new(|_, v| 1.0 / (1.0 + v * v)),
            Arc::new(|_, v| -2.0 * v / (1.0 + v * v).powi(2)),
        ),
        Arc::new(|y| (y + 1.0).sqrt()),
    )
    .with_k1(Arc::new(|x, y| x * x * y))
}

#[test]
fn example1_reaches_machine_precision_at_m8() {
    let sol = solve(&example1(), 8).unwrap();
    assert!(relative_error(&sol, f64::exp).unwrap() <= 1e-14);
    let e4 = relative_error(&solve(&example1(), 4).unwrap(), f64::exp).unwrap();
    assert!(e4 <= 1e-6, "{e4}");
}

#[test]
fn example2_reaches_machine_precision_at_m16() {
    let sol = solve(&example2(), 16).unwrap();
    let err = relative_error(&sol, |y| (PI * y / 2.0).sin()).unwrap();
    assert!(err <= 1e-14, "{err}");
}

#[test]
fn example7_right_hand_side_matches_quadrature() {
    // g(y) = f(y) - ∫_0^1 |x-y|^{-1/2} x(1-x) dx with f = sqrt(x(1-x))
    let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 10_000 };
    for y in [0.0f64, 0.13, 0.5, 0.77, 1.0] {
        let mut integral = 0.0;
        // x = y ± s^2 removes the singularity on each side
        if y > 0.0 {
            let len = y.sqrt();
            integral += integrate(|s| 2.0 * (y - s * s) * (1.0 - y + s * s), 0.0, len, opts).unwrap().value;
        }
        if y < 1.0 {
            let len = (1.0 - y).sqrt();
            integral += integrate(|s| 2.0 * (y + s * s) * (1.0 - y - s * s), 0.0, len, opts).unwrap().value;
        }
        let expected = (y * (1.0 - y)).sqrt() - integral;
        assert!((example7_g(y) - expected).abs() < 1e-13, "y={y}");
    }
}

#[test]
fn example7_default_start_finds_the_other_root() {
    let problem = HammersteinProblem { initial_guess: None, ..example7() };
    let sol = solve(&problem, 4).unwrap();
    assert!(sol.a.iter().all(|&v| v < 0.0));
}

#[test]
fn example7_product_rule_is_exact_at_m4() {
    let sol = solve(&example7(), 4).unwrap();
    let err = relative_error(&sol, |s| {
        let x = 0.5 * (s + 1.0);
        (x * (1.0 - x)).sqrt()
    })
    .unwrap();
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn example8_constant_solution_at_m4() {
    let problem = HammersteinProblem::new(
        SecondKernel::BieComposite {
            rho: Arc::new(|_, _| 0.5 * std::f64::consts::LN_2),
            psi: Arc::new(|_| 0.5),
        },
        Nemytskii::with_derivative(Arc::new(|_, v| (PI * v).sin()), Arc::new(|_, v| PI * (PI * v).cos())),
        Arc::new(|_| 1.0),
    );
    let sol = solve(&problem, 4).unwrap();
    assert!(relative_error(&sol, |_| 1.0).unwrap() <= 1e-13);
}

#[test]
fn residual_certificate_on_examples() {
    for (problem, m) in [(example1(), 8), (example2(), 16), (example7(), 4), (example9(), 32)] {
        let sol = solve(&problem, m).unwrap();
        assert!(sol.residual_norm <= 1e-13 * (1.0 + max_norm(&sol.a)), "m={m}: {}", sol.residual_norm);
    }
}

#[test]
fn collocation_identity_with_singular_kernel() {
    let sol = solve(&example9(), 16).unwrap();
    for (k, &x) in sol.nodes().iter().enumerate() {
        let v = sol.interpolant_eval(x).unwrap();
        assert!((v - sol.a[k]).abs() <= 1e-12 * (1.0 + sol.a[k].abs()), "k={k}");
    }
}

#[test]
fn linear_problem_matches_direct_solve() {
    let problem = HammersteinProblem::new(
        SecondKernel::Smooth(Arc::new(|x, y| 0.3 * (x * y).cos())),
        Nemytskii::identity(),
        Arc::new(|y| y.exp()),
    )
    .with_k1(Arc::new(|x, y| 0.2 * (x + y)));
    let m = 24;
    let sol = solve(&problem, m).unwrap();
    let rule = QuadratureRule::new(m).unwrap();
    let (x, w) = (rule.nodes(), rule.weights());
    let mut a = Matrix::identity(m);
    for i in 0..m {
        for k in 0..m {
            a[(i, k)] -= w[k] * (0.2 * (x[k] + x[i]) + 0.3 * (x[k] * x[i]).cos());
        }
    }
    let b: Vec<f64> = x.iter().map(|y| y.exp()).collect();
    let direct = lu_solve(a, &b).unwrap();
    for (u, v) in sol.a.iter().zip(&direct) {
        assert!((u - v).abs() <= 1e-12, "{u} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // g built from the discrete operators makes f̂(nodes) an exact root
    #[test]
    fn manufactured_solution_is_a_fixed_point(
        c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, c2 in 0.5f64..2.0, m in 4usize..24, singular in any::<bool>()
    ) {
        let fhat = move |x: f64| c0 + c1 * x + (c2 * x).sin();
        let rule = QuadratureRule::new(m).unwrap();
        let base = if singular {
            HammersteinProblem::new(
                SecondKernel::Singular(SingularKernel::logarithmic(Arc::new(|x| 1.0 + 0.5 * x))),
                cubic(),
                Arc::new(|_| 0.0),
            )
        } else {
            HammersteinProblem::new(
                SecondKernel::Smooth(Arc::new(|x, y| 0.25 * (x - y).exp())),
                cubic(),
                Arc::new(|_| 0.0),
            )
        }
        .with_k1(Arc::new(|x, y| 0.1 * x * y));
        let zero_rhs = assemble_system(&base, Arc::new(rule.clone())).unwrap();
        let a: Vec<f64> = rule.nodes().iter().map(|&x| fhat(x)).collect();
        // with g ≡ 0 the residual at f̂ is exactly the g that makes f̂ a root
        let g_nodes = zero_rhs.residual(&a).unwrap();
        let nodes = rule.nodes().to_vec();
        let g_fn = move |y: f64| {
            let k = nodes.iter().position(|&x| x == y).expect("evaluated at a node");
            g_nodes[k]
        };
        let problem = HammersteinProblem { g: nystrom_core::nystrom::GFn(Arc::new(g_fn)), ..base };
        let system = assemble_system(&problem, Arc::new(rule)).unwrap();
        let r = system.residual(&a).unwrap();
        prop_assert!(max_norm(&r) <= 1e-13 * (1.0 + max_norm(&a)));
    }

    #[test]
    fn collocation_identity(m in 2usize..40, scale in 0.05f64..0.4) {
        let problem = HammersteinProblem::new(
            SecondKernel::Smooth(Arc::new(move |x, y| scale * (x + 2.0 * y).cos())),
            Nemytskii::with_derivative(Arc::new(|_, v| v.sin()), Arc::new(|_, v| v.cos())),
            Arc::new(|y| 1.0 + 0.5 * y),
        )
        .with_k1(Arc::new(|x, y| 0.2 * x * y.sin()));
        let sol = solve(&problem, m).unwrap();
        for (k, &x) in sol.nodes().iter().enumerate() {
            let v = sol.interpolant_eval(x).unwrap();
            prop_assert!((v - sol.a[k]).abs() <= 1e-12 * (1.0 + sol.a[k].abs()));
        }
    }
}
