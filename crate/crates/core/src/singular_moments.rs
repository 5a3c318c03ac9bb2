//! Product rules for weakly singular kernels `ψ(x) k*(|x - y|)`.
//!
//! The modified moments `M_i(y) = ∫ p_i(x) k*(|x-y|) dx` are computed for
//! `k*` alone; the smooth factor `ψ` is sampled at the nodes when the rule
//! is applied. The weights are
//!
//! ```text
//! c_k(y) = λ_k Σ_{i<m} p_i(x_k) M_i(y)
//! ```
//!
//! Moments come from a forward three-term recurrence. For `|x-y|^μ` it
//! follows from the Legendre differential equation,
//!
//! ```text
//! (n + μ + 2) I_{n+1} = (2n + 1) y I_n - (n - μ - 1) I_{n-1},
//! ```
//!
//! on the classical family, and the logarithmic recurrence is its
//! derivative in `μ` at `μ = 0`. Every moment vector is spot-checked against
//! an adaptive-quadrature evaluation; a miss switches that `y` to the slow
//! path where every moment is integrated adaptively.

use std::sync::Arc;

use crate::adaptive::{self, AdaptiveOptions, PANEL_POINTS};
use crate::error::{invalid, Error, Result};
use crate::gauss_legendre::{LegendreRecurrence, QuadratureRule, MAX_ORDER};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance of the spot check, absolute plus relative.
pub const VALIDATION_TOL: f64 = 1e-10;

/// The singular factor `k*(|x-y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `|x - y|^μ` with `μ > -1`, `μ != 0`.
    Algebraic(f64),
    /// `log |x - y|`.
    Logarithmic,
}

impl KernelKind {
    pub fn algebraic(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= -1.0 {
            return Err(invalid(format!("algebraic exponent must exceed -1, got {mu}")));
        }
        if mu == 0.0 {
            return Err(invalid(
                "exponent 0 is reserved for the logarithmic kernel; use KernelKind::Logarithmic",
            ));
        }
        Ok(Self::Algebraic(mu))
    }

    fn check(&self) -> Result<()> {
        match *self {
            Self::Algebraic(mu) => Self::algebraic(mu).map(|_| ()),
            Self::Logarithmic => Ok(()),
        }
    }

    /// `k*(|d|)`.
    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            Self::Algebraic(mu) => d.abs().powf(mu),
            Self::Logarithmic => d.abs().ln(),
        }
    }
}

/// Weakly singular kernel `ψ(x) k*(|x-y|)`.
#[derive(Clone)]
pub struct SingularKernel {
    kind: KernelKind,
    psi: RealFn,
}

impl std::fmt::Debug for SingularKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SingularKernel").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl SingularKernel {
    pub fn new(kind: KernelKind, psi: RealFn) -> Result<Self> {
        kind.check()?;
        Ok(Self { kind, psi })
    }

    pub fn algebraic(mu: f64, psi: RealFn) -> Result<Self> {
        Self::new(KernelKind::algebraic(mu)?, psi)
    }

    pub fn logarithmic(psi: RealFn) -> Self {
        Self { kind: KernelKind::Logarithmic, psi }
    }

    /// Kernel with `ψ ≡ 1`.
    pub fn unit(kind: KernelKind) -> Result<Self> {
        Self::new(kind, Arc::new(|_| 1.0))
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn psi(&self, x: f64) -> f64 {
        (self.psi)(x)
    }
}

/// Modified moments for one `y`, with a flag recording whether the
/// recurrence failed its spot check and the slow path was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedMoments {
    pub y: f64,
    pub values: Vec<f64>,
    pub used_fallback: bool,
}

fn check_y(y: f64) -> Result<f64> {
    if !y.is_finite() || y.abs() > 1.0 + 4.0 * f64::EPSILON {
        return Err(invalid(format!("collocation point must lie in [-1,1], got {y}")));
    }
    Ok(y.clamp(-1.0, 1.0))
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Recurrence-only moments `M_i(y)`, `i < n`, without any validation.
pub fn recurrence_moments(kind: KernelKind, n: usize, y: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    let a = 1.0 - y;
    let b = 1.0 + y;
    // classical moments I_n first, scaled to the orthonormal family at the end
    match kind {
        KernelKind::Algebraic(mu) => {
            let e1 = mu + 1.0;
            out[0] = (a.powf(e1) + b.powf(e1)) / e1;
            if n > 1 {
                out[1] = (a.powf(e1 + 1.0) - b.powf(e1 + 1.0)) / (e1 + 1.0) + y * out[0];
            }
            for k in 1..n.saturating_sub(1) {
                let kf = k as f64;
                out[k + 1] = ((2.0 * kf + 1.0) * y * out[k] - (kf - mu - 1.0) * out[k - 1])
                    / (kf + mu + 2.0);
            }
        }
        KernelKind::Logarithmic => {
            out[0] = xlogx(a) + xlogx(b) - 2.0;
            if n > 1 {
                out[1] = 0.5 * a * xlogx(a) - 0.25 * a * a - 0.5 * b * xlogx(b)
                    + 0.25 * b * b
                    + y * out[0];
            }
            if n > 2 {
                out[2] = y * out[1] + 2.0 / 3.0;
            }
            for k in 2..n.saturating_sub(1) {
                let kf = k as f64;
                out[k + 1] =
                    ((2.0 * kf + 1.0) * y * out[k] - (kf - 1.0) * out[k - 1]) / (kf + 2.0);
            }
        }
    }
    for (i, v) in out.iter_mut().enumerate() {
        *v *= ((2 * i + 1) as f64 / 2.0).sqrt();
    }
    out
}

/// `∫_{-1}^{1} f(x) k*(|x-y|) dx` by adaptive quadrature, split at `x = y`
/// with a change of variables that removes the singularity on each side.
pub fn oracle_integral<F: Fn(f64) -> f64>(
    kind: KernelKind,
    f: F,
    y: f64,
    opts: AdaptiveOptions,
) -> Result<f64> {
    oracle_integral_batched(
        kind,
        |xs, out| {
            for (o, &x) in out.iter_mut().zip(xs) {
                *o = f(x);
            }
        },
        y,
        opts,
    )
}

fn oracle_integral_batched<F>(kind: KernelKind, mut f: F, y: f64, opts: AdaptiveOptions) -> Result<f64>
where
    F: FnMut(&[f64; PANEL_POINTS], &mut [f64; PANEL_POINTS]),
{
    kind.check()?;
    let y = check_y(y)?;
    let mut total = 0.0;
    let mut xs = [0.0; PANEL_POINTS];
    // side = +1: [y, 1], side = -1: [-1, y]
    for side in [1.0, -1.0] {
        let len = if side > 0.0 { 1.0 - y } else { 1.0 + y };
        if len <= 0.0 {
            continue;
        }
        let part = match kind {
            KernelKind::Algebraic(mu) => {
                // x = y ± L t^{1/(μ+1)}: the weight becomes constant
                let e1 = mu + 1.0;
                let p = 1.0 / e1;
                let scale = len.powf(e1) / e1;
                // the tolerance applies to the scaled contribution
                let side_opts = AdaptiveOptions { abs_tol: 0.5 * opts.abs_tol / scale, ..opts };
                let est = adaptive::integrate_batched(
                    |ts, out| {
                        for (x, &t) in xs.iter_mut().zip(ts) {
                            *x = y + side * len * t.powf(p);
                        }
                        f(&xs, out);
                    },
                    0.0,
                    1.0,
                    side_opts,
                )?;
                scale * est.value
            }
            KernelKind::Logarithmic => {
                // x = y ± L t^3
                let log_len = len.ln();
                let side_opts = AdaptiveOptions { abs_tol: 0.5 * opts.abs_tol, ..opts };
                adaptive::integrate_batched(
                    |ts, out| {
                        for (x, &t) in xs.iter_mut().zip(ts) {
                            *x = y + side * len * t * t * t;
                        }
                        f(&xs, out);
                        for (o, &t) in out.iter_mut().zip(ts) {
                            *o = if t == 0.0 {
                                0.0
                            } else {
                                *o * (log_len + 3.0 * t.ln()) * 3.0 * len * t * t
                            };
                        }
                    },
                    0.0,
                    1.0,
                    side_opts,
                )?
                .value
            }
        };
        total += part;
    }
    Ok(total)
}

fn validation_indices(n: usize) -> Vec<usize> {
    let mut idx = vec![0, 1, n / 2, n.saturating_sub(1)];
    idx.retain(|&i| i < n);
    idx.sort_unstable();
    idx.dedup();
    idx
}

fn oracle_options() -> AdaptiveOptions {
    AdaptiveOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 100_000 }
}

fn oracle_moment(kind: KernelKind, rec: &LegendreRecurrence, i: usize, y: f64) -> Result<f64> {
    oracle_integral_batched(kind, |xs, out| rec.eval_many(i, xs, out), y, oracle_options())
}

/// Validated modified moments `M_i(y)` for `i < n`.
pub fn modified_moments(kind: KernelKind, n: usize, y: f64) -> Result<ModifiedMoments> {
    kind.check()?;
    if n == 0 || n > MAX_ORDER {
        return Err(invalid(format!("moment count must lie in 1..={MAX_ORDER}, got {n}")));
    }
    let y = check_y(y)?;
    let values = recurrence_moments(kind, n, y);
    let rec = LegendreRecurrence::new(n);
    let mut ok = values.iter().all(|v| v.is_finite());
    if ok {
        for i in validation_indices(n) {
            let reference = oracle_moment(kind, &rec, i, y)?;
            if (values[i] - reference).abs() > VALIDATION_TOL * (1.0 + reference.abs()) {
                ok = false;
                break;
            }
        }
    }
    if ok {
        return Ok(ModifiedMoments { y, values, used_fallback: false });
    }
    let values = (0..n)
        .map(|i| oracle_moment(kind, &rec, i, y))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Computation(format!("moment fallback failed at y = {y}: {e}")))?;
    Ok(ModifiedMoments { y, values, used_fallback: true })
}

/// Weights `c_k(y)` of the product rule at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductWeights {
    pub y: f64,
    pub c: Vec<f64>,
    pub used_fallback: bool,
}

/// Product rule on the Gauss–Legendre nodes for a fixed singular factor.
///
/// Holds the `m × m` table `p_i(x_k)` so that weights at many points reuse
/// it.
#[derive(Debug, Clone)]
pub struct ProductRule {
    rule: Arc<QuadratureRule>,
    kind: KernelKind,
    // row k: λ_k p_i(x_k), i < m
    scaled_basis: Vec<f64>,
}

impl ProductRule {
    pub fn new(rule: Arc<QuadratureRule>, kind: KernelKind) -> Result<Self> {
        kind.check()?;
        let m = rule.order();
        let mut scaled_basis = rule.basis_table(m);
        for (row, &w) in scaled_basis.chunks_mut(m).zip(rule.weights()) {
            row.iter_mut().for_each(|v| *v *= w);
        }
        Ok(Self { rule, kind, scaled_basis })
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn weights(&self, y: f64) -> Result<ProductWeights> {
        let moments = modified_moments(self.kind, self.rule.order(), y)?;
        Ok(self.weights_from_moments(&moments))
    }

    /// Weights from a moment vector of length at least `m`; only the first
    /// `m` moments are used.
    pub fn weights_from_moments(&self, moments: &ModifiedMoments) -> ProductWeights {
        let m = self.rule.order();
        assert!(moments.values.len() >= m, "moment vector shorter than rule order");
        let mom = &moments.values[..m];
        let c = self
            .scaled_basis
            .chunks(m)
            .map(|row| row.iter().zip(mom).map(|(a, b)| a * b).sum())
            .collect();
        ProductWeights { y: moments.y, c, used_fallback: moments.used_fallback }
    }

    /// Discrete Legendre coefficients `Σ_k λ_k p_i(x_k) F_k` of node samples,
    /// so that `Σ_k c_k(y) F_k = Σ_i M_i(y) coeff_i`.
    pub fn project(&self, samples: &[f64]) -> Vec<f64> {
        let m = self.rule.order();
        assert_eq!(samples.len(), m);
        let mut coeffs = vec![0.0; m];
        for (row, &s) in self.scaled_basis.chunks(m).zip(samples) {
            for (c, &b) in coeffs.iter_mut().zip(row) {
                *c += b * s;
            }
        }
        coeffs
    }
}

/// Convenience form of [`ProductRule::weights`] for a single point.
pub fn product_weights(
    rule: &Arc<QuadratureRule>,
    kernel: &SingularKernel,
    y: f64,
) -> Result<ProductWeights> {
    ProductRule::new(rule.clone(), kernel.kind())?.weights(y)
}

/// `I_m(f, y) = Σ_k c_k(y) ψ(x_k) f(x_k)`.
pub fn singular_integral<F: Fn(f64) -> f64>(
    rule: &Arc<QuadratureRule>,
    kernel: &SingularKernel,
    f: F,
    y: f64,
) -> Result<f64> {
    let w = product_weights(rule, kernel, y)?;
    let mut sum = 0.0;
    for (&x, &c) in rule.nodes().iter().zip(&w.c) {
        let v = kernel.psi(x) * f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { what: "product-rule integrand", x });
        }
        sum += c * v;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_legendre::{gauss_rule, legendre_eval};

    fn oracle(kind: KernelKind, i: usize, y: f64) -> f64 {
        oracle_integral(kind, |x| legendre_eval(i, x), y, oracle_options()).unwrap()
    }

    #[test]
    fn single_moment_values() {
        let m = modified_moments(KernelKind::Logarithmic, 1, 0.0).unwrap();
        assert!((m.values[0] + std::f64::consts::SQRT_2).abs() < 1e-15);
        let m = modified_moments(KernelKind::Algebraic(-0.5), 1, 0.0).unwrap();
        assert!((m.values[0] - 2.8284271247461903).abs() < 1e-15);
        let m = modified_moments(KernelKind::Logarithmic, 2, 0.0).unwrap();
        assert_eq!(m.values[1], 0.0);
    }

    #[test]
    fn log_moments_at_endpoint_closed_form() {
        // ∫ P_n(x) log(1-x) dx = -2/(n(n+1)) for n >= 1
        let v = recurrence_moments(KernelKind::Logarithmic, 300, 1.0);
        for (n, &val) in v.iter().enumerate().skip(1) {
            let exact = -2.0 / (n * (n + 1)) as f64 * ((2 * n + 1) as f64 / 2.0).sqrt();
            assert!((val - exact).abs() < 1e-13 * (1.0 + exact.abs()), "n={n}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(KernelKind::algebraic(-1.0).is_err());
        assert!(KernelKind::algebraic(0.0).is_err());
        assert!(modified_moments(KernelKind::Algebraic(-1.5), 4, 0.0).is_err());
        assert!(modified_moments(KernelKind::Logarithmic, 4, 1.5).is_err());
        assert!(modified_moments(KernelKind::Logarithmic, 0, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_oracle() {
        let kinds = [
            KernelKind::Logarithmic,
            KernelKind::Algebraic(-0.5),
            KernelKind::Algebraic(-0.9),
            KernelKind::Algebraic(0.7),
        ];
        for kind in kinds {
            for &y in &[-1.0, -0.999, -0.6, 0.0, 0.1234, 0.95, 1.0] {
                let v = recurrence_moments(kind, 200, y);
                for &i in &[0usize, 1, 2, 3, 17, 64, 199] {
                    let r = oracle(kind, i, y);
                    assert!(
                        (v[i] - r).abs() <= 1e-10 * (1.0 + r.abs()),
                        "{kind:?} y={y} i={i}: {} vs {r}",
                        v[i]
                    );
                }
            }
        }
    }

    #[test]
    fn validated_moments_do_not_fall_back() {
        for kind in [KernelKind::Logarithmic, KernelKind::Algebraic(-0.5)] {
            for &y in &[-1.0, -0.3, 0.77, 1.0] {
                let m = modified_moments(kind, 64, y).unwrap();
                assert!(!m.used_fallback, "{kind:?} y={y}");
            }
        }
    }

    #[test]
    fn parity() {
        for kind in [KernelKind::Logarithmic, KernelKind::Algebraic(-0.5)] {
            for &y in &[0.0, 0.2, 0.5, 0.99, 1.0] {
                let p = recurrence_moments(kind, 128, y);
                let q = recurrence_moments(kind, 128, -y);
                for i in 0..128 {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((p[i] - s * q[i]).abs() < 1e-12, "{kind:?} y={y} i={i}");
                }
            }
        }
    }

    #[test]
    fn weight_sums() {
        let rule = Arc::new(gauss_rule(4).unwrap());
        let log = SingularKernel::unit(KernelKind::Logarithmic).unwrap();
        let w = product_weights(&rule, &log, 0.0).unwrap();
        assert!((w.c.iter().sum::<f64>() + 2.0).abs() < 1e-12);

        let alg = SingularKernel::unit(KernelKind::Algebraic(-0.5)).unwrap();
        let w = product_weights(&rule, &alg, 1.0).unwrap();
        assert!((w.c.iter().sum::<f64>() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn singular_integral_examples() {
        let r4 = Arc::new(gauss_rule(4).unwrap());
        let log = SingularKernel::unit(KernelKind::Logarithmic).unwrap();
        assert!((singular_integral(&r4, &log, |_| 1.0, 0.0).unwrap() + 2.0).abs() < 1e-12);

        let r1 = Arc::new(gauss_rule(1).unwrap());
        let alg = SingularKernel::unit(KernelKind::Algebraic(-0.5)).unwrap();
        assert!((singular_integral(&r1, &alg, |_| 1.0, 0.0).unwrap() - 4.0).abs() < 1e-12);

        let r8 = Arc::new(gauss_rule(8).unwrap());
        let got = singular_integral(&r8, &log, |x| legendre_eval(3, x), 0.2).unwrap();
        let want = oracle(KernelKind::Logarithmic, 3, 0.2);
        assert!((got - want).abs() < 1e-9);
    }

    #[test]
    fn projection_agrees_with_weights() {
        let rule = Arc::new(gauss_rule(24).unwrap());
        let pr = ProductRule::new(rule.clone(), KernelKind::Logarithmic).unwrap();
        let samples: Vec<f64> = rule.nodes().iter().map(|x| (3.0 * x).sin() + x * x).collect();
        let coeffs = pr.project(&samples);
        let mom = modified_moments(KernelKind::Logarithmic, 24, -0.41).unwrap();
        let via_coeffs: f64 = coeffs.iter().zip(&mom.values).map(|(a, b)| a * b).sum();
        let w = pr.weights_from_moments(&mom);
        let via_weights: f64 = w.c.iter().zip(&samples).map(|(a, b)| a * b).sum();
        assert!((via_coeffs - via_weights).abs() < 1e-13);
    }
}
