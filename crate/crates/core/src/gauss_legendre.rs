//! Orthonormal Legendre polynomials and Gauss–Legendre rules on [-1, 1].
//!
//! `legendre_eval` returns the family orthonormal with respect to the unit
//! weight, `p_0 = 1/sqrt(2)`. The classically normalized family
//! (`P_n(1) = 1`) is only used internally to locate the nodes.

use crate::error::{invalid, Error, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 4096;

const NEWTON_STEP_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Off-diagonal coefficient of the orthonormal three-term recurrence,
/// `x p_k = b_{k+1} p_{k+1} + b_k p_{k-1}`.
#[inline]
pub(crate) fn recurrence_coeff(k: usize) -> f64 {
    let k = k as f64;
    k / (4.0 * k * k - 1.0).sqrt()
}

/// Evaluates the orthonormal Legendre polynomial `p_i(x)`.
pub fn legendre_eval(i: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..i {
        let b_k = if k == 0 { 0.0 } else { recurrence_coeff(k) };
        let next = (x * cur - b_k * prev) / recurrence_coeff(k + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[i] = p_i(x)` for `i < out.len()`.
pub fn legendre_eval_all(x: f64, out: &mut [f64]) {
    LegendreRecurrence::new(out.len()).eval_all(x, out);
}

/// Precomputed recurrence coefficients for repeated evaluation of the
/// orthonormal family up to a fixed degree.
#[derive(Debug, Clone)]
pub(crate) struct LegendreRecurrence {
    // inv_b[k] = 1/b_{k}, b[k] = b_k
    b: Vec<f64>,
    inv_b: Vec<f64>,
}

impl LegendreRecurrence {
    /// Supports degrees `0..len`.
    pub(crate) fn new(len: usize) -> Self {
        let n = len.max(2);
        let mut b = vec![0.0; n];
        let mut inv_b = vec![0.0; n];
        for k in 1..n {
            b[k] = recurrence_coeff(k);
            inv_b[k] = 1.0 / b[k];
        }
        Self { b, inv_b }
    }

    /// `out[j] = p_i(xs[j])`, running the recurrences side by side.
    pub(crate) fn eval_many<const N: usize>(&self, i: usize, xs: &[f64; N], out: &mut [f64; N]) {
        let mut prev = [0.0; N];
        let mut cur = [std::f64::consts::FRAC_1_SQRT_2; N];
        for k in 0..i {
            let (b, inv) = (self.b[k], self.inv_b[k + 1]);
            for j in 0..N {
                let next = (xs[j] * cur[j] - b * prev[j]) * inv;
                prev[j] = cur[j];
                cur[j] = next;
            }
        }
        *out = cur;
    }

    pub(crate) fn eval_all(&self, x: f64, out: &mut [f64]) {
        let n = out.len();
        if n == 0 {
            return;
        }
        out[0] = std::f64::consts::FRAC_1_SQRT_2;
        if n == 1 {
            return;
        }
        out[1] = x * out[0] * self.inv_b[1];
        for k in 1..n - 1 {
            out[k + 1] = (x * out[k] - self.b[k] * out[k - 1]) * self.inv_b[k + 1];
        }
    }
}

/// Classical Legendre `P_n(x)` and its derivative.
pub(crate) fn legendre_classical(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    let deriv = if (1.0 - x * x).abs() < f64::EPSILON {
        // P'_n(±1) = (±1)^{n+1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * cur - prev) / (x * x - 1.0)
    };
    (cur, deriv)
}

/// Gauss–Legendre nodes and Christoffel numbers for a given order `m`.
///
/// Nodes are strictly increasing and exactly antisymmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the `m`-point rule by Newton iteration on `P_m`.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(invalid(format!(
                "rule order must lie in 1..={MAX_ORDER}, got {m}"
            )));
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        let mf = m as f64;
        for k in 1..=half {
            // k-th largest zero
            let mut x = (std::f64::consts::PI * (4.0 * k as f64 - 1.0) / (4.0 * mf + 2.0)).cos();
            let mut converged = false;
            for _ in 0..NEWTON_MAX_ITER {
                let (p, dp) = legendre_classical(m, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= NEWTON_STEP_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Computation(format!(
                    "Newton iteration for node {k} of the {m}-point rule did not converge"
                )));
            }
            if m % 2 == 1 && k == half {
                x = 0.0;
            }
            let (_, dp) = legendre_classical(m, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[m - k] = x;
            weights[m - k] = w;
            nodes[k - 1] = -x;
            weights[k - 1] = w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Christoffel numbers `λ_k`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ λ_k f(x_k)`; a non-finite sample is reported as an error.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "integrand", x });
            }
            sum += w * v;
        }
        Ok(sum)
    }

    /// Row-major table `t[k * n + i] = p_i(x_k)` for `i < n`.
    pub fn basis_table(&self, n: usize) -> Vec<f64> {
        let rec = LegendreRecurrence::new(n);
        let mut table = vec![0.0; self.order() * n];
        for (k, &x) in self.nodes.iter().enumerate() {
            rec.eval_all(x, &mut table[k * n..(k + 1) * n]);
        }
        table
    }
}

/// Convenience wrapper around [`QuadratureRule::new`].
pub fn gauss_rule(m: usize) -> Result<QuadratureRule> {
    QuadratureRule::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_values() {
        assert_eq!(legendre_eval(0, 0.3), std::f64::consts::FRAC_1_SQRT_2);
        assert!((legendre_eval(1, 0.5) - 0.6123724356957945).abs() < 1e-15);
        let r = 1.0 / 3f64.sqrt();
        assert!(legendre_eval(2, r).abs() < 1e-15);
        assert!(legendre_eval(2, -r).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_matches_closed_form_degree_three() {
        // p_3 = sqrt(7/2) (5x^3 - 3x)/2
        for &x in &[-0.9, -0.2, 0.0, 0.41, 1.0] {
            let exact = (3.5f64).sqrt() * (5.0 * x * x * x - 3.0 * x) / 2.0;
            assert!((legendre_eval(3, x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_all_agrees_with_single() {
        let mut buf = vec![0.0; 40];
        legendre_eval_all(0.37, &mut buf);
        for (i, v) in buf.iter().enumerate() {
            assert!((v - legendre_eval(i, 0.37)).abs() < 1e-13);
        }
    }

    #[test]
    fn eval_many_agrees_with_single() {
        let rec = LegendreRecurrence::new(300);
        let xs = [-1.0, -0.93, -0.2, 0.0, 0.51, 0.999, 1.0];
        let mut out = [0.0; 7];
        rec.eval_many(257, &xs, &mut out);
        for (x, v) in xs.iter().zip(out) {
            assert!((v - legendre_eval(257, *x)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_rules() {
        let r1 = gauss_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);

        let r2 = gauss_rule(2).unwrap();
        assert!((r2.nodes()[0] + 0.5773502691896258).abs() < 1e-15);
        assert!((r2.nodes()[1] - 0.5773502691896258).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-15);
        assert!((r2.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(gauss_rule(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            gauss_rule(MAX_ORDER + 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn integrates_exp_and_cos() {
        let r8 = gauss_rule(8).unwrap();
        let v = r8.integrate(f64::exp).unwrap();
        assert!((v - 2.3504023872876028).abs() < 1e-14);

        let r16 = gauss_rule(16).unwrap();
        let v = r16.integrate(f64::cos).unwrap();
        assert!((v - 1.6829419696157930).abs() < 1e-14);

        let r2 = gauss_rule(2).unwrap();
        assert!((r2.integrate(|x| x * x).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn integrate_reports_non_finite() {
        let r = gauss_rule(4).unwrap();
        assert!(matches!(
            r.integrate(|x| 1.0 / (x - x)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn weights_sum_and_symmetry_large_orders() {
        for &m in &[3usize, 17, 128, 512, 2048, 4096] {
            let r = gauss_rule(m).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "m={m} sum={sum}");
            for k in 0..m {
                assert_eq!(r.nodes()[k], -r.nodes()[m - 1 - k]);
                assert!(r.weights()[k] > 0.0);
            }
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes()[0] > -1.0 && r.nodes()[m - 1] < 1.0);
        }
    }

    #[test]
    fn discrete_orthonormality() {
        for &m in &[5usize, 32, 100] {
            let r = gauss_rule(m).unwrap();
            let t = r.basis_table(m);
            for i in 0..m {
                for j in 0..m {
                    let s: f64 = (0..m)
                        .map(|k| r.weights()[k] * t[k * m + i] * t[k * m + j])
                        .sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((s - expected).abs() < 1e-12, "m={m} i={i} j={j} s={s}");
                }
            }
        }
    }

    #[test]
    fn node_residual() {
        // Absolute residual for small orders; for larger ones the floating
        // point spacing of x times |P'_m| sets the floor.
        for m in 1..=16 {
            let r = gauss_rule(m).unwrap();
            for &x in r.nodes() {
                assert!(legendre_classical(m, x).0.abs() <= 1e-14, "m={m}");
            }
        }
        for m in [64usize, 512, 2048] {
            let r = gauss_rule(m).unwrap();
            for &x in r.nodes() {
                let (p, dp) = legendre_classical(m, x);
                assert!(p.abs() <= 1e-14 * dp.abs().max(1.0), "m={m} x={x}");
            }
        }
    }
}
