//! Closed parametric curves `γ: [-1,1] -> R^2` with two derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Vertices of the polygon used for inside tests and orientation.
pub const POLYGON_VERTICES: usize = 2048;

/// Grid size for the `|γ'| > 0` check.
pub const SPEED_CHECK_POINTS: usize = 1001;

pub type Point = [f64; 2];

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
}

impl CurveJet {
    pub fn speed(&self) -> f64 {
        self.d1[0].hypot(self.d1[1])
    }
}

/// A parameterization of a closed curve over `[-1, 1]`.
pub trait Parametrization: Send + Sync {
    fn jet(&self, x: f64) -> CurveJet;
}

impl<F: Fn(f64) -> CurveJet + Send + Sync> Parametrization for F {
    fn jet(&self, x: f64) -> CurveJet {
        self(x)
    }
}

/// `(a cos θ, b sin θ)` with `θ = π(x+1)`.
#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
}

impl Parametrization for Ellipse {
    fn jet(&self, x: f64) -> CurveJet {
        let (s, c) = (PI * (x + 1.0)).sin_cos();
        CurveJet {
            pos: [self.a * c, self.b * s],
            d1: [-PI * self.a * s, PI * self.b * c],
            d2: [-PI * PI * self.a * c, -PI * PI * self.b * s],
        }
    }
}

/// `R(θ) (cos θ, sin θ)` with `R(θ) = e^{cos θ} cos² 2θ + e^{sin θ} sin² 2θ`.
#[derive(Debug, Clone, Copy)]
pub struct Amoeba;

impl Parametrization for Amoeba {
    fn jet(&self, x: f64) -> CurveJet {
        let t = PI * (x + 1.0);
        let (s, c) = t.sin_cos();
        let (s4, c4) = (4.0 * t).sin_cos();
        let cc = (2.0 * t).cos().powi(2);
        let ss = (2.0 * t).sin().powi(2);
        let ea = c.exp();
        let eb = s.exp();
        let (ea1, ea2) = (-s * ea, (s * s - c) * ea);
        let (eb1, eb2) = (c * eb, (c * c - s) * eb);
        let (cc1, cc2) = (-2.0 * s4, -8.0 * c4);
        let (ss1, ss2) = (2.0 * s4, 8.0 * c4);
        let r = ea * cc + eb * ss;
        let r1 = ea1 * cc + ea * cc1 + eb1 * ss + eb * ss1;
        let r2 = ea2 * cc + 2.0 * ea1 * cc1 + ea * cc2 + eb2 * ss + 2.0 * eb1 * ss1 + eb * ss2;
        let d1 = [r1 * c - r * s, r1 * s + r * c];
        let d2 = [r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s];
        CurveJet { pos: [r * c, r * s], d1: [PI * d1[0], PI * d1[1]], d2: [PI * PI * d2[0], PI * PI * d2[1]] }
    }
}

/// Trigonometric interpolant of equispaced samples of a closed curve.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    // phase of the first sample, θ_0 = π(x_0 + 1)
    theta0: f64,
    // real Fourier series per coordinate: value = a0 + Σ (ak cos kφ + bk sin kφ)
    a0: [f64; 2],
    cos_coef: Vec<[f64; 2]>,
    sin_coef: Vec<[f64; 2]>,
}

impl TrigInterpolant {
    /// Builds the interpolant from samples `(x_j, ξ_j, η_j)` with
    /// `x_j = x_0 + 2j/N`, `j < N`.
    pub fn new(x0: f64, samples: &[Point]) -> Result<Self> {
        let n = samples.len();
        if n < 3 {
            return Err(Error::Geometry(format!("need at least 3 curve samples, got {n}")));
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|p| Complex::new(p[0], p[1])).collect();
        fft.process(&mut buf);
        // buf[k] = Σ_j (ξ_j + i η_j) e^{-2πijk/N}; split into the two real series
        let nf = n as f64;
        let coef = |k: usize| -> (Complex<f64>, Complex<f64>) {
            let zk = buf[k % n];
            let zmk = buf[(n - k % n) % n].conj();
            let xi = (zk + zmk) * 0.5 / nf;
            let eta = (zk - zmk) * Complex::new(0.0, -0.5) / nf;
            (xi, eta)
        };
        let (c0x, c0y) = coef(0);
        let half = n / 2;
        let mut cos_coef = Vec::new();
        let mut sin_coef = Vec::new();
        for k in 1..=half {
            let (cx, cy) = coef(k);
            // Nyquist term of an even count carries half weight and no sine
            let nyquist = n % 2 == 0 && k == half;
            let scale = if nyquist { 1.0 } else { 2.0 };
            cos_coef.push([scale * cx.re, scale * cy.re]);
            sin_coef.push(if nyquist { [0.0, 0.0] } else { [-2.0 * cx.im, -2.0 * cy.im] });
        }
        Ok(Self { theta0: PI * (x0 + 1.0), a0: [c0x.re, c0y.re], cos_coef, sin_coef })
    }

    /// Reads a sample file: one `x ξ η` triple per line on a uniform grid
    /// covering one period. Blank lines and `#` comments are skipped; a
    /// final sample that repeats the first point one period later is dropped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut pts = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
            if vals.len() != 3 || vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected three finite numbers `x xi eta`, got `{line}`"),
                });
            }
            xs.push(vals[0]);
            pts.push([vals[1], vals[2]]);
        }
        if xs.len() < 4 {
            return Err(Error::Parse { line: 0, message: "need at least 4 samples".into() });
        }
        let last = xs.len() - 1;
        if (xs[last] - xs[0] - 2.0).abs() < 1e-9 {
            xs.pop();
            pts.pop();
        }
        let n = xs.len();
        let h = 2.0 / n as f64;
        for (j, &x) in xs.iter().enumerate() {
            if (x - xs[0] - j as f64 * h).abs() > 1e-9 {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("sample {j} at x = {x} is off the uniform grid of spacing {h}"),
                });
            }
        }
        Self::new(xs[0], &pts)
    }
}

impl Parametrization for TrigInterpolant {
    fn jet(&self, x: f64) -> CurveJet {
        let phi = PI * (x + 1.0) - self.theta0;
        let mut pos = self.a0;
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        for (k, (ck, sk)) in self.cos_coef.iter().zip(&self.sin_coef).enumerate() {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * phi).sin_cos();
            for d in 0..2 {
                pos[d] += ck[d] * c + sk[d] * s;
                d1[d] += kf * (sk[d] * c - ck[d] * s);
                d2[d] -= kf * kf * (ck[d] * c + sk[d] * s);
            }
        }
        CurveJet { pos, d1: [PI * d1[0], PI * d1[1]], d2: [PI * PI * d2[0], PI * PI * d2[1]] }
    }
}

/// A validated closed, regular, counter-clockwise curve.
#[derive(Clone)]
pub struct BoundaryCurve {
    param: Arc<dyn Parametrization>,
    polygon: Arc<Vec<Point>>,
    bbox: [f64; 4],
}

impl fmt::Debug for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCurve").field("bbox", &self.bbox).finish_non_exhaustive()
    }
}

fn shoelace(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

impl BoundaryCurve {
    /// Checks closure, `|γ'| > 0` on a 1001-point grid and counter-clockwise
    /// orientation of the 2048-vertex polygon.
    pub fn new(param: Arc<dyn Parametrization>) -> Result<Self> {
        let start = param.jet(-1.0);
        let end = param.jet(1.0);
        let polygon: Vec<Point> = (0..POLYGON_VERTICES)
            .map(|i| param.jet(-1.0 + 2.0 * i as f64 / POLYGON_VERTICES as f64).pos)
            .collect();
        if polygon.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("curve has non-finite points".into()));
        }
        let mut bbox = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &polygon {
            bbox[0] = bbox[0].min(p[0]);
            bbox[1] = bbox[1].min(p[1]);
            bbox[2] = bbox[2].max(p[0]);
            bbox[3] = bbox[3].max(p[1]);
        }
        let scale = (bbox[2] - bbox[0]).max(bbox[3] - bbox[1]);
        let gap = (start.pos[0] - end.pos[0]).hypot(start.pos[1] - end.pos[1]);
        if !(gap <= 1e-10 * (1.0 + scale)) {
            return Err(Error::Geometry(format!("curve is not closed: |γ(1) - γ(-1)| = {gap:e}")));
        }
        for i in 0..SPEED_CHECK_POINTS {
            let x = -1.0 + 2.0 * i as f64 / (SPEED_CHECK_POINTS - 1) as f64;
            let speed = param.jet(x).speed();
            if !(speed > 0.0) || !speed.is_finite() {
                return Err(Error::Geometry(format!("|γ'({x})| = {speed} is not positive")));
            }
        }
        let area = shoelace(&polygon);
        if !(area > 0.0) {
            return Err(Error::Geometry(format!(
                "curve must be counter-clockwise (signed area {area:e})"
            )));
        }
        Ok(Self { param, polygon: Arc::new(polygon), bbox })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
        }
        Self::new(Arc::new(Ellipse { a, b }))
    }

    pub fn unit_circle() -> Result<Self> {
        Self::ellipse(1.0, 1.0)
    }

    pub fn amoeba() -> Result<Self> {
        Self::new(Arc::new(Amoeba))
    }

    pub fn from_samples_file(path: &Path) -> Result<Self> {
        Self::new(Arc::new(TrigInterpolant::from_file(path)?))
    }

    pub fn from_samples_text(text: &str) -> Result<Self> {
        Self::new(Arc::new(TrigInterpolant::parse(text)?))
    }

    pub fn jet(&self, x: f64) -> CurveJet {
        self.param.jet(x)
    }

    pub fn polygon(&self) -> &[Point] {
        &self.polygon
    }

    /// `[x_min, y_min, x_max, y_max]` of the polygon.
    pub fn bounding_box(&self) -> [f64; 4] {
        self.bbox
    }

    pub fn signed_area(&self) -> f64 {
        shoelace(&self.polygon)
    }

    /// Winding number of the polygon around `p`.
    pub fn winding_number(&self, p: Point) -> i32 {
        let poly = &self.polygon;
        let n = poly.len();
        let mut wn = 0;
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
            if a[1] <= p[1] {
                if b[1] > p[1] && cross > 0.0 {
                    wn += 1;
                }
            } else if b[1] <= p[1] && cross < 0.0 {
                wn -= 1;
            }
        }
        wn
    }

    pub fn contains(&self, p: Point) -> bool {
        self.winding_number(p) != 0
    }

    /// Distance from `p` to the polygon.
    pub fn distance(&self, p: Point) -> f64 {
        let poly = &self.polygon;
        let n = poly.len();
        (0..n)
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len2 = dx * dx + dy * dy;
                let t = if len2 > 0.0 {
                    (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
            })
            .fold(f64::INFINITY, f64::min)
    }
}
