use std::sync::Arc;

use nystrom_core::adaptive::AdaptiveOptions;
use nystrom_core::singular_moments::{modified_moments, oracle_integral, ProductRule};
use nystrom_core::{gauss_rule, KernelKind, QuadratureRule};
use proptest::prelude::*;

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

// ∫_{-1}^{1} Σ c_j x^j dx
fn exact_monomial_integral(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { 2.0 * c / (j as f64 + 1.0) } else { 0.0 })
        .sum()
}

fn probe_grid() -> Vec<f64> {
    (0..21).map(|i| -1.0 + 0.1 * i as f64).collect()
}

fn kind_strategy() -> impl Strategy<Value = KernelKind> {
    prop_oneof![
        Just(KernelKind::Logarithmic),
        (-0.9f64..-0.05).prop_map(KernelKind::Algebraic),
        (0.05f64..1.5).prop_map(KernelKind::Algebraic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_rule_is_exact_to_degree_2m_minus_1(
        m in 1usize..=64,
        raw in prop::collection::vec(-1.0f64..1.0, 128)
    ) {
        let coeffs = &raw[..2 * m];
        let rule = gauss_rule(m).unwrap();
        let approx = rule.integrate(|x| horner(coeffs, x)).unwrap();
        let exact = exact_monomial_integral(coeffs);
        prop_assert!((approx - exact).abs() <= 1e-12 * (1.0 + exact.abs()), "m={m}: {approx} vs {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn product_rule_is_exact_on_polynomials(
        m in 1usize..=20,
        kind in kind_strategy(),
        raw in prop::collection::vec(-1.0f64..1.0, 20)
    ) {
        let coeffs = &raw[..m];
        let rule = Arc::new(gauss_rule(m).unwrap());
        let product = ProductRule::new(rule.clone(), kind).unwrap();
        let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 20_000 };
        for y in probe_grid() {
            let w = product.weights(y).unwrap();
            let approx: f64 = w.c.iter().zip(rule.nodes()).map(|(c, &x)| c * horner(coeffs, x)).sum();
            let exact = oracle_integral(kind, |x| horner(coeffs, x), y, opts).unwrap();
            prop_assert!((approx - exact).abs() <= 1e-9 * (1.0 + exact.abs()), "y={y}: {approx} vs {exact}");
        }
    }

    #[test]
    fn moment_parity(n in 1usize..300, y in 0.0f64..=1.0, kind in kind_strategy()) {
        let plus = modified_moments(kind, n, y).unwrap().values;
        let minus = modified_moments(kind, n, -y).unwrap().values;
        for (i, (p, q)) in plus.iter().zip(&minus).enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((p - sign * q).abs() <= 1e-12, "i={i}: {p} vs {q}");
        }
    }
}

#[test]
fn product_weights_stay_bounded_in_m() {
    for kind in [KernelKind::Logarithmic, KernelKind::Algebraic(-0.5), KernelKind::Algebraic(0.5)] {
        let sup = |m: usize| {
            let product = ProductRule::new(Arc::new(QuadratureRule::new(m).unwrap()), kind).unwrap();
            probe_grid()
                .into_iter()
                .map(|y| product.weights(y).unwrap().c.iter().map(|c| c.abs()).sum::<f64>())
                .fold(0.0f64, f64::max)
        };
        let (small, large) = (sup(16), sup(256));
        assert!(large <= 1.5 * small, "{kind:?}: {small} -> {large}");
    }
}

#[test]
fn weights_reproduce_kernel_integral_of_one() {
    let rule = Arc::new(gauss_rule(4).unwrap());
    let log = ProductRule::new(rule.clone(), KernelKind::Logarithmic).unwrap();
    assert!((log.weights(0.0).unwrap().c.iter().sum::<f64>() + 2.0).abs() < 1e-12);
    let alg = ProductRule::new(rule, KernelKind::Algebraic(-0.5)).unwrap();
    let s: f64 = alg.weights(1.0).unwrap().c.iter().sum();
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-10);
}
