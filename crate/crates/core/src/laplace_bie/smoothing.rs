//! Smoothing maps `φ: [-1,1] -> [-1,1]` whose derivatives vanish at the
//! endpoints, used to reparameterize the boundary curve.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Largest integer exponent evaluated by the binomial expansion; above it
/// the alternating sum loses too many digits and the incomplete beta
/// function is used instead.
const MAX_BINOMIAL_Q: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    Identity,
    /// `φ(x) = 2 ∫_{-1}^x (1-t²)^{q-1} dt / B - 1`.
    Integral { q: f64, norm: f64 },
    /// Powers of `q` within `eps` of the endpoints, cubic Hermite between.
    Piecewise { q: f64, eps: f64, a: f64, b: f64 },
}

/// A smoothing map together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingMap {
    form: Form,
}

/// `(φ(x), φ'(x), φ''(x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapValue {
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(invalid(format!("smoothing exponent must satisfy q >= 1, got {q}")));
    }
    Ok(())
}

fn is_small_integer(q: f64) -> bool {
    q.fract() == 0.0 && q <= MAX_BINOMIAL_Q
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

// ∫_{-1}^x (1-t²)^{n} dt by binomial expansion
fn polynomial_antiderivative(n: u32, x: f64) -> f64 {
    (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let p = 2 * j + 1;
            sign * binomial(n, j) * (x.powi(p as i32) + 1.0) / p as f64
        })
        .sum()
}

impl SmoothingMap {
    /// `φ(x) = x`.
    pub fn identity() -> Self {
        Self { form: Form::Identity }
    }

    /// The integral-form map with exponent `q >= 1`; `q = 1` is the
    /// identity.
    pub fn integral(q: f64) -> Result<Self> {
        check_q(q)?;
        if q == 1.0 {
            return Ok(Self::identity());
        }
        let norm = if is_small_integer(q) {
            polynomial_antiderivative(q as u32 - 1, 1.0)
        } else {
            (0.5 * std::f64::consts::PI.ln() + ln_gamma(q) - ln_gamma(q + 0.5)).exp()
        };
        Ok(Self { form: Form::Integral { q, norm } })
    }

    /// The piecewise map: `-1 + (x+1)^q` on `[-1, -1+eps]`, `1 - (1-x)^q` on
    /// `[1-eps, 1]`, and the odd cubic matching value and slope in between.
    pub fn piecewise(q: f64, eps: f64) -> Result<Self> {
        check_q(q)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("piecewise map needs 0 < eps < 1, got {eps}")));
        }
        if q == 1.0 {
            return Ok(Self::identity());
        }
        let c = 1.0 - eps;
        let slope = q * eps.powf(q - 1.0);
        let value = 1.0 - eps.powf(q);
        let b = (slope * c - value) / (2.0 * c * c * c);
        let a = slope - 3.0 * b * c * c;
        if a <= 0.0 || a + 3.0 * b * c * c <= 0.0 {
            return Err(invalid(format!("piecewise map with q = {q}, eps = {eps} is not monotone")));
        }
        Ok(Self { form: Form::Piecewise { q, eps, a, b } })
    }

    pub fn piecewise_default(q: f64) -> Result<Self> {
        Self::piecewise(q, 0.1)
    }

    /// Exponent `q` (1 for the identity).
    pub fn q(&self) -> f64 {
        match self.form {
            Form::Identity => 1.0,
            Form::Integral { q, .. } | Form::Piecewise { q, .. } => q,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.form, Form::Identity)
    }

    /// `∫_{-1}^{1} (1-t²)^{q-1} dt` for the integral form.
    pub fn normalizer(&self) -> Option<f64> {
        match self.form {
            Form::Identity => Some(2.0),
            Form::Integral { norm, .. } => Some(norm),
            Form::Piecewise { .. } => None,
        }
    }

    pub fn eval(&self, x: f64) -> MapValue {
        match self.form {
            Form::Identity => MapValue { phi: x, d1: 1.0, d2: 0.0 },
            Form::Integral { q, norm } => {
                let w = (1.0 - x * x).max(0.0);
                let phi = if x <= -1.0 {
                    -1.0
                } else if x >= 1.0 {
                    1.0
                } else if is_small_integer(q) {
                    2.0 * polynomial_antiderivative(q as u32 - 1, x) / norm - 1.0
                } else {
                    2.0 * beta_reg(q, q, 0.5 * (x + 1.0)) - 1.0
                };
                let d1 = 2.0 * w.powf(q - 1.0) / norm;
                let d2 = -4.0 * (q - 1.0) * x * w.powf(q - 2.0) / norm;
                MapValue { phi, d1, d2 }
            }
            Form::Piecewise { q, eps, a, b } => {
                if x <= -1.0 + eps {
                    let t = (x + 1.0).max(0.0);
                    MapValue {
                        phi: -1.0 + t.powf(q),
                        d1: q * t.powf(q - 1.0),
                        d2: q * (q - 1.0) * t.powf(q - 2.0),
                    }
                } else if x >= 1.0 - eps {
                    let t = (1.0 - x).max(0.0);
                    MapValue {
                        phi: 1.0 - t.powf(q),
                        d1: q * t.powf(q - 1.0),
                        d2: -q * (q - 1.0) * t.powf(q - 2.0),
                    }
                } else {
                    MapValue { phi: a * x + b * x * x * x, d1: a + 3.0 * b * x * x, d2: 6.0 * b * x }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_is_identity() {
        for m in [SmoothingMap::integral(1.0).unwrap(), SmoothingMap::piecewise_default(1.0).unwrap()] {
            assert!(m.is_identity());
            for &x in &[-1.0, -0.3, 0.7, 1.0] {
                assert_eq!(m.eval(x), MapValue { phi: x, d1: 1.0, d2: 0.0 });
            }
        }
    }

    #[test]
    fn q2_values() {
        let m = SmoothingMap::integral(2.0).unwrap();
        assert!((m.normalizer().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let v = m.eval(0.0);
        assert!(v.phi.abs() < 1e-16);
        assert!((v.d1 - 1.5).abs() < 1e-15);
        assert_eq!(m.eval(1.0).d1, 0.0);
        assert_eq!(m.eval(-1.0).d1, 0.0);
    }

    #[test]
    fn endpoints_and_monotonicity() {
        let maps = [
            SmoothingMap::integral(2.0).unwrap(),
            SmoothingMap::integral(2.5).unwrap(),
            SmoothingMap::integral(4.0).unwrap(),
            SmoothingMap::integral(15.0).unwrap(),
            SmoothingMap::piecewise_default(3.0).unwrap(),
        ];
        for m in maps {
            assert!((m.eval(-1.0).phi + 1.0).abs() < 1e-14, "{m:?}");
            assert!((m.eval(1.0).phi - 1.0).abs() < 1e-14, "{m:?}");
            let mut prev = -1.0;
            for i in 1..=200 {
                let x = -1.0 + i as f64 / 100.0;
                let v = m.eval(x);
                assert!(v.phi >= prev && v.d1 >= 0.0, "{m:?} at {x}");
                prev = v.phi;
            }
        }
    }

    #[test]
    fn integer_and_beta_forms_agree() {
        // integer q via the binomial sum, the same q nudged off the integers via the beta function
        let int = SmoothingMap::integral(3.0).unwrap();
        let near = SmoothingMap::integral(3.0 + 1e-12).unwrap();
        for &x in &[-0.8, -0.1, 0.33, 0.95] {
            assert!((int.eval(x).phi - near.eval(x).phi).abs() < 1e-10);
            assert!((int.eval(x).d1 - near.eval(x).d1).abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for m in [
            SmoothingMap::integral(2.0).unwrap(),
            SmoothingMap::integral(3.5).unwrap(),
            SmoothingMap::piecewise_default(2.5).unwrap(),
        ] {
            for &x in &[-0.95, -0.5, 0.2, 0.85] {
                let (lo, hi, v) = (m.eval(x - h), m.eval(x + h), m.eval(x));
                assert!(((hi.phi - lo.phi) / (2.0 * h) - v.d1).abs() < 1e-7, "{m:?} {x}");
                assert!(((hi.d1 - lo.d1) / (2.0 * h) - v.d2).abs() < 1e-6, "{m:?} {x}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SmoothingMap::integral(0.5).is_err());
        assert!(SmoothingMap::integral(f64::NAN).is_err());
        assert!(SmoothingMap::piecewise(2.0, 0.0).is_err());
    }
}
