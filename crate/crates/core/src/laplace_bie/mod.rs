//! Interior Neumann problem for the Laplace equation with a nonlinear
//! boundary condition
//!
//! ```text
//! Δu = 0 in D,    ∂u/∂n = -h̄(P, u) + ḡ(P) on Γ,
//! ```
//!
//! rewritten as a Hammerstein equation on `[-1, 1]` for `f(x) = u(γ̄(x))`,
//! where `γ̄ = γ ∘ φ` is the boundary parameterization composed with a
//! smoothing map. The kernel of the nonlinear term is split as
//! `ρ(x,y) + ψ(x) log|x-y|`, so that the Gauss rule handles `ρ` and the
//! logarithmic product rule handles the rest.

pub mod curve;
pub mod smoothing;

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{invalid, Error, Result};
use crate::gauss_legendre::{LegendreRecurrence, QuadratureRule};
use crate::nystrom::{self, HammersteinProblem, Nemytskii, NystromSolution, SecondKernel};
use crate::singular_moments::{modified_moments, KernelKind};

pub use curve::{BoundaryCurve, CurveJet, Parametrization, Point};
pub use smoothing::{MapValue, SmoothingMap};

/// Gauss nodes used for the right-hand side integral.
pub const RHS_NODES: usize = 2048;

/// Below this periodic parameter distance `k1` takes its diagonal limit,
/// which avoids the cancellation in the chord.
pub const NEAR_DIAGONAL: f64 = 6.055454452393343e-6; // ε^{1/3}

/// Below this parameter distance, periodic or not, chords are computed by
/// integrating `γ̄'` with a Gauss rule of `MEAN_VELOCITY_NODES` nodes.
pub const MEAN_VELOCITY_RADIUS: f64 = 1e-3;
const MEAN_VELOCITY_NODES: usize = 8;

// Legendre coefficients of the right-hand side density below this fraction
// of the largest one are at the round-off floor of the projection.
const COEFFICIENT_FLOOR: f64 = 64.0 * f64::EPSILON;
// Coefficients within this factor of the RMS of the last quarter, which is
// pure round-off when the data is resolved, are dropped as well.
const TAIL_NOISE_FACTOR: f64 = 8.0;

/// A point of `Γ` with the exterior unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub position: Point,
    pub normal: Point,
}

pub type BoundaryFn = Arc<dyn Fn(&BoundaryPoint) -> f64 + Send + Sync>;
pub type BoundaryNonlinearity = Arc<dyn Fn(&BoundaryPoint, f64) -> f64 + Send + Sync>;

/// Curve, smoothing map and boundary data of one Neumann problem.
#[derive(Clone)]
pub struct BoundaryProblem {
    pub curve: BoundaryCurve,
    pub map: SmoothingMap,
    pub hbar: BoundaryNonlinearity,
    /// `∂h̄/∂v`; a central difference is used when absent.
    pub hbar_v: Option<BoundaryNonlinearity>,
    pub gbar: BoundaryFn,
    /// Gauss nodes for the right-hand side.
    pub rhs_nodes: usize,
}

impl fmt::Debug for BoundaryProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryProblem")
            .field("curve", &self.curve)
            .field("map", &self.map)
            .field("rhs_nodes", &self.rhs_nodes)
            .finish_non_exhaustive()
    }
}

/// `(γ̄, γ̄', γ̄'')` at one parameter together with the unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothJet {
    pub x: f64,
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
    pub normal: Point,
}

impl SmoothJet {
    pub fn speed(&self) -> f64 {
        self.d1[0].hypot(self.d1[1])
    }

    pub fn boundary_point(&self) -> BoundaryPoint {
        BoundaryPoint { position: self.pos, normal: self.normal }
    }
}

impl BoundaryProblem {
    pub fn new(curve: BoundaryCurve, map: SmoothingMap, hbar: BoundaryNonlinearity, gbar: BoundaryFn) -> Self {
        Self { curve, map, hbar, hbar_v: None, gbar, rhs_nodes: RHS_NODES }
    }

    pub fn with_hbar_derivative(mut self, hbar_v: BoundaryNonlinearity) -> Self {
        self.hbar_v = Some(hbar_v);
        self
    }

    pub fn with_rhs_nodes(mut self, n: usize) -> Self {
        self.rhs_nodes = n;
        self
    }

    /// The problem whose solution is the harmonic function `u` with
    /// gradient `grad_u`: `ḡ = ∂u/∂n + h̄(P, u)`.
    pub fn manufactured(
        curve: BoundaryCurve,
        map: SmoothingMap,
        hbar: BoundaryNonlinearity,
        hbar_v: Option<BoundaryNonlinearity>,
        u: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
        grad_u: Arc<dyn Fn(Point) -> Point + Send + Sync>,
    ) -> Self {
        let h = hbar.clone();
        let gbar: BoundaryFn = Arc::new(move |p: &BoundaryPoint| {
            let g = grad_u(p.position);
            g[0] * p.normal[0] + g[1] * p.normal[1] + h(p, u(p.position))
        });
        Self { curve, map, hbar, hbar_v, gbar, rhs_nodes: RHS_NODES }
    }

    /// `(γ̄(x), γ̄'(x), γ̄''(x))` by the chain rule through `φ`.
    pub fn curve_eval(&self, x: f64) -> SmoothJet {
        let v = self.map.eval(x);
        let j = self.curve.jet(v.phi);
        let speed = j.d1[0].hypot(j.d1[1]);
        SmoothJet {
            x,
            pos: j.pos,
            d1: [j.d1[0] * v.d1, j.d1[1] * v.d1],
            d2: [j.d2[0] * v.d1 * v.d1 + j.d1[0] * v.d2, j.d2[1] * v.d1 * v.d1 + j.d1[1] * v.d2],
            normal: [j.d1[1] / speed, -j.d1[0] / speed],
        }
    }

    pub fn hbar_derivative(&self, p: &BoundaryPoint, v: f64) -> f64 {
        match &self.hbar_v {
            Some(d) => d(p, v),
            None => {
                let step = f64::EPSILON.cbrt() * v.abs().max(1.0);
                ((self.hbar)(p, v + step) - (self.hbar)(p, v - step)) / (2.0 * step)
            }
        }
    }
}

fn is_endpoint(x: f64) -> bool {
    x.abs() == 1.0
}

// parameter distance on the closed curve, where -1 and 1 coincide
fn periodic_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(2.0 - d)
}

fn diagonal_k1(j: &SmoothJet) -> Result<f64> {
    let s2 = j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1];
    if s2 == 0.0 {
        if is_endpoint(j.x) {
            return Ok(0.0);
        }
        return Err(Error::Geometry(format!("|γ̄'({})| = 0 away from the endpoints", j.x)));
    }
    Ok(FRAC_1_PI * (j.d1[0] * j.d2[1] - j.d1[1] * j.d2[0]) / (2.0 * s2))
}

fn mean_velocity_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::new(MEAN_VELOCITY_NODES).expect("small Gauss rule"))
}

// ∫_a^b γ̄'(t) dt by a short Gauss rule
fn velocity_integral(problem: &BoundaryProblem, a: f64, b: f64) -> Point {
    let rule = mean_velocity_rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut v = [0.0; 2];
    for (t, w) in rule.nodes().iter().zip(rule.weights()) {
        let j = problem.curve_eval(mid + half * t);
        v[0] += w * j.d1[0];
        v[1] += w * j.d1[1];
    }
    [half * v[0], half * v[1]]
}

/// `γ̄(y) - γ̄(x)`. Short arcs, including those that wrap through the
/// endpoint `±1`, are integrated from `γ̄'` so that nearby points do not
/// lose digits to the subtraction of positions.
pub fn chord(problem: &BoundaryProblem, jx: &SmoothJet, jy: &SmoothJet) -> Point {
    let (x, y) = (jx.x, jy.x);
    let d = (y - x).abs();
    if d < MEAN_VELOCITY_RADIUS {
        velocity_integral(problem, x, y)
    } else if 2.0 - d < MEAN_VELOCITY_RADIUS {
        if x < y {
            let (u, v) = (velocity_integral(problem, y, 1.0), velocity_integral(problem, -1.0, x));
            [-u[0] - v[0], -u[1] - v[1]]
        } else {
            let (u, v) = (velocity_integral(problem, x, 1.0), velocity_integral(problem, -1.0, y));
            [u[0] + v[0], u[1] + v[1]]
        }
    } else {
        [jy.pos[0] - jx.pos[0], jy.pos[1] - jx.pos[1]]
    }
}

fn coincident(jx: &SmoothJet, jy: &SmoothJet) -> Error {
    Error::Geometry(format!("curve points at x = {} and y = {} coincide", jx.x, jy.x))
}

/// Double-layer kernel `k1(x, y)` from precomputed jets at `x` and `y`.
pub fn k1_from_jets(problem: &BoundaryProblem, jx: &SmoothJet, jy: &SmoothJet) -> Result<f64> {
    if periodic_distance(jx.x, jy.x) < NEAR_DIAGONAL {
        return diagonal_k1(jx);
    }
    let c = chord(problem, jx, jy);
    let r2 = c[0] * c[0] + c[1] * c[1];
    if r2 == 0.0 {
        return Err(coincident(jx, jy));
    }
    Ok(FRAC_1_PI * (jx.d1[0] * c[1] - jx.d1[1] * c[0]) / r2)
}

/// `ρ(x, y) = (1/π)|γ̄'(x)| log(|γ̄(y) - γ̄(x)| / |x - y|)` from jets.
pub fn rho_from_jets(problem: &BoundaryProblem, jx: &SmoothJet, jy: &SmoothJet) -> Result<f64> {
    let speed = jx.speed();
    if speed == 0.0 {
        return Ok(0.0);
    }
    let d = (jy.x - jx.x).abs();
    let ratio = if d < f64::EPSILON {
        speed
    } else {
        let c = chord(problem, jx, jy);
        c[0].hypot(c[1]) / d
    };
    if ratio == 0.0 {
        return Err(coincident(jx, jy));
    }
    Ok(FRAC_1_PI * speed * ratio.ln())
}

fn check_parameter(x: f64, name: &str) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(invalid(format!("{name} must lie in [-1,1], got {x}")));
    }
    Ok(())
}

/// The double-layer kernel `k1(x, y)`, with its continuous diagonal limit.
pub fn k1_kernel(problem: &BoundaryProblem, x: f64, y: f64) -> Result<f64> {
    check_parameter(x, "x")?;
    check_parameter(y, "y")?;
    k1_from_jets(problem, &problem.curve_eval(x), &problem.curve_eval(y))
}

/// The smooth part `ρ(x, y)` of the split logarithmic kernel.
pub fn rho_kernel(problem: &BoundaryProblem, x: f64, y: f64) -> Result<f64> {
    check_parameter(x, "x")?;
    check_parameter(y, "y")?;
    rho_from_jets(problem, &problem.curve_eval(x), &problem.curve_eval(y))
}

/// `ψ(x) = |γ̄'(x)| / π`.
pub fn psi(problem: &BoundaryProblem, x: f64) -> f64 {
    FRAC_1_PI * problem.curve_eval(x).speed()
}

/// Right-hand side
/// `g(y) = -(1/π) ∫ ḡ(γ̄(x)) |γ̄'(x)| log|γ̄(y) - γ̄(x)| dx`
/// with the Gauss rule on the `ρ` part and the product rule on the
/// `log|x - y|` part, both on `M` nodes.
///
/// The product-rule sum is taken as `Σ_i M_i(y) F̂_i` with the discrete
/// Legendre coefficients `F̂_i` of `F = ḡ ψ` on the `M` nodes; coefficients
/// at the round-off floor are dropped, so only as many moments as the data
/// needs are computed.
#[derive(Clone)]
pub struct RhsEvaluator {
    problem: BoundaryProblem,
    rule: Arc<QuadratureRule>,
    jets: Vec<SmoothJet>,
    // λ_k ḡ(γ̄(x_k))
    weighted_gbar: Vec<f64>,
    coefficients: Vec<f64>,
}

impl fmt::Debug for RhsEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RhsEvaluator")
            .field("nodes", &self.rule.order())
            .field("coefficients", &self.coefficients.len())
            .finish_non_exhaustive()
    }
}

impl RhsEvaluator {
    pub fn new(problem: &BoundaryProblem) -> Result<Self> {
        Self::with_nodes(problem, problem.rhs_nodes)
    }

    pub fn with_nodes(problem: &BoundaryProblem, nodes: usize) -> Result<Self> {
        let rule = Arc::new(QuadratureRule::new(nodes)?);
        let jets: Vec<SmoothJet> = rule.nodes().iter().map(|&x| problem.curve_eval(x)).collect();
        let gbar: Vec<f64> = jets.iter().map(|j| (problem.gbar)(&j.boundary_point())).collect();
        if let Some(k) = gbar.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "boundary data ḡ", x: rule.nodes()[k] });
        }
        let weighted_gbar = gbar.iter().zip(rule.weights()).map(|(g, w)| g * w).collect();

        let rec = LegendreRecurrence::new(nodes);
        let mut coefficients = vec![0.0; nodes];
        let mut basis = vec![0.0; nodes];
        for (k, j) in jets.iter().enumerate() {
            let f = rule.weights()[k] * gbar[k] * FRAC_1_PI * j.speed();
            if f == 0.0 {
                continue;
            }
            rec.eval_all(rule.nodes()[k], &mut basis);
            for (c, b) in coefficients.iter_mut().zip(&basis) {
                *c += f * b;
            }
        }
        let peak = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tail = &coefficients[3 * nodes / 4..];
        let tail_rms = (tail.iter().map(|c| c * c).sum::<f64>() / tail.len().max(1) as f64).sqrt();
        let floor = (COEFFICIENT_FLOOR * peak).max(TAIL_NOISE_FACTOR * tail_rms);
        let keep = coefficients
            .iter()
            .rposition(|c| c.abs() > floor)
            .map_or(0, |i| i + 1);
        coefficients.truncate(keep);

        Ok(Self { problem: problem.clone(), rule, jets, weighted_gbar, coefficients })
    }

    /// Number of Legendre coefficients kept for the product-rule part.
    pub fn retained_coefficients(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        check_parameter(y, "y")?;
        let jy = self.problem.curve_eval(y);
        let mut sum = CompensatedSum::default();
        for (jx, w) in self.jets.iter().zip(&self.weighted_gbar) {
            if *w != 0.0 {
                sum.add(w * rho_from_jets(&self.problem, jx, &jy)?);
            }
        }
        if !self.coefficients.is_empty() {
            let moments = modified_moments(KernelKind::Logarithmic, self.coefficients.len(), y)?;
            for (m, c) in moments.values.iter().zip(&self.coefficients) {
                sum.add(m * c);
            }
        }
        Ok(-sum.value())
    }
}

// Neumaier summation
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `g(y)` for a single point; builds an [`RhsEvaluator`] each call.
pub fn rhs_g(problem: &BoundaryProblem, y: f64) -> Result<f64> {
    RhsEvaluator::new(problem)?.eval(y)
}

// Jets at the collocation nodes, computed once and shared by the kernels.
#[derive(Clone)]
struct JetCache {
    problem: BoundaryProblem,
    table: Arc<HashMap<u64, SmoothJet>>,
}

impl JetCache {
    fn new(problem: &BoundaryProblem, nodes: &[f64]) -> Self {
        let table = nodes.iter().map(|&x| (x.to_bits(), problem.curve_eval(x))).collect();
        Self { problem: problem.clone(), table: Arc::new(table) }
    }

    fn get(&self, x: f64) -> SmoothJet {
        self.table.get(&x.to_bits()).copied().unwrap_or_else(|| self.problem.curve_eval(x))
    }
}

/// The Hammerstein problem for `f = u ∘ γ̄` whose collocation at the
/// `m`-point Gauss nodes is the boundary system.
pub fn hammerstein_problem(problem: &BoundaryProblem, m: usize) -> Result<HammersteinProblem> {
    let rule = QuadratureRule::new(m)?;
    let cache = JetCache::new(problem, rule.nodes());
    let rhs = Arc::new(RhsEvaluator::new(problem)?);

    let c = cache.clone();
    let k1 = Arc::new(move |x: f64, y: f64| k1_from_jets(&c.problem, &c.get(x), &c.get(y)).unwrap_or(f64::NAN));
    let c = cache.clone();
    let rho = Arc::new(move |x: f64, y: f64| rho_from_jets(&c.problem, &c.get(x), &c.get(y)).unwrap_or(f64::NAN));
    let c = cache.clone();
    let psi = Arc::new(move |x: f64| FRAC_1_PI * c.get(x).speed());
    let c = cache.clone();
    let hbar = problem.hbar.clone();
    let h = Arc::new(move |x: f64, v: f64| hbar(&c.get(x).boundary_point(), v));
    let c = cache;
    let p = problem.clone();
    let h_v = Arc::new(move |x: f64, v: f64| p.hbar_derivative(&c.get(x).boundary_point(), v));
    let g = Arc::new(move |y: f64| rhs.eval(y).unwrap_or(f64::NAN));

    Ok(HammersteinProblem::new(
        SecondKernel::BieComposite { rho, psi },
        Nemytskii::with_derivative(h, h_v),
        g,
    )
    .with_k1(k1))
}

/// Solves the boundary equation; `sol.a[k]` approximates `u(γ̄(x_k))`.
pub fn solve_bie(problem: &BoundaryProblem, m: usize) -> Result<NystromSolution> {
    if m < 4 {
        return Err(invalid(format!("boundary solves need m >= 4, got {m}")));
    }
    nystrom::solve(&hammerstein_problem(problem, m)?, m)
}

/// Discrete Green representation of the interior potential from a boundary
/// solution.
#[derive(Debug, Clone)]
pub struct PotentialEvaluator {
    curve: BoundaryCurve,
    jets: Vec<SmoothJet>,
    // λ_k f_m(x_k)
    double_layer: Vec<f64>,
    // λ_k (h(x_k, f_m(x_k)) - ḡ_k) |γ̄'(x_k)|
    single_layer: Vec<f64>,
}

impl PotentialEvaluator {
    pub fn new(problem: &BoundaryProblem, sol: &NystromSolution) -> Result<Self> {
        let jets: Vec<SmoothJet> = sol.nodes().iter().map(|&x| problem.curve_eval(x)).collect();
        let lambda = sol.rule.weights();
        let double_layer = lambda.iter().zip(&sol.a).map(|(w, a)| w * a).collect();
        let mut single_layer = Vec::with_capacity(jets.len());
        for (k, j) in jets.iter().enumerate() {
            let bp = j.boundary_point();
            let v = lambda[k] * ((problem.hbar)(&bp, sol.a[k]) - (problem.gbar)(&bp)) * j.speed();
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "boundary density", x: j.x });
            }
            single_layer.push(v);
        }
        Ok(Self { curve: problem.curve.clone(), jets, double_layer, single_layer })
    }

    /// `u_m(P)`; points on or outside `Γ` are rejected.
    pub fn eval(&self, p: Point) -> Result<f64> {
        if !(p[0].is_finite() && p[1].is_finite()) || !self.curve.contains(p) {
            return Err(Error::Domain(format!("point ({}, {}) is not inside the curve", p[0], p[1])));
        }
        let mut dl = 0.0;
        let mut sl = 0.0;
        for ((j, a), s) in self.jets.iter().zip(&self.double_layer).zip(&self.single_layer) {
            let dx = j.pos[0] - p[0];
            let dy = j.pos[1] - p[1];
            let r2 = dx * dx + dy * dy;
            if r2 == 0.0 {
                return Err(Error::Domain(format!("point ({}, {}) lies on the curve", p[0], p[1])));
            }
            dl += a * (j.d1[1] * dx - j.d1[0] * dy) / r2;
            sl += s * 0.5 * r2.ln();
        }
        Ok((dl + sl) / (2.0 * PI))
    }
}

/// The discrete double layer of unit density,
/// `(1/2π) Σ_k λ_k [γ̄'(x_k) × (γ̄(x_k) - P)] / |γ̄(x_k) - P|²`, which equals 1
/// inside the curve up to quadrature error.
pub fn unit_double_layer(problem: &BoundaryProblem, rule: &QuadratureRule, p: Point) -> Result<f64> {
    if !(p[0].is_finite() && p[1].is_finite()) || !problem.curve.contains(p) {
        return Err(Error::Domain(format!("point ({}, {}) is not inside the curve", p[0], p[1])));
    }
    let mut sum = CompensatedSum::default();
    for (&x, w) in rule.nodes().iter().zip(rule.weights()) {
        let j = problem.curve_eval(x);
        let dx = j.pos[0] - p[0];
        let dy = j.pos[1] - p[1];
        sum.add(w * (j.d1[1] * dx - j.d1[0] * dy) / (dx * dx + dy * dy));
    }
    Ok(sum.value() / (2.0 * PI))
}

/// `u_m(P)` for a single point.
pub fn potential_eval(problem: &BoundaryProblem, sol: &NystromSolution, p: Point) -> Result<f64> {
    PotentialEvaluator::new(problem, sol)?.eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_problem(gbar: f64) -> BoundaryProblem {
        BoundaryProblem::new(
            BoundaryCurve::unit_circle().unwrap(),
            SmoothingMap::identity(),
            Arc::new(|_, v| v),
            Arc::new(move |_| gbar),
        )
    }

    #[test]
    fn circle_kernels() {
        let p = circle_problem(1.0);
        for &(x, y) in &[(-0.7, 0.2), (0.1, 0.9), (0.5, -0.5)] {
            assert!((k1_kernel(&p, x, y).unwrap() - 0.5).abs() < 1e-14);
        }
        assert!((k1_kernel(&p, 0.3, 0.3).unwrap() - 0.5).abs() < 1e-14);
        assert!((rho_kernel(&p, 0.4, 0.4).unwrap() - PI.ln()).abs() < 1e-14);
        assert!((psi(&p, 0.1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn straight_segment_has_zero_rho() {
        let seg = BoundaryProblem::new(
            BoundaryCurve::unit_circle().unwrap(),
            SmoothingMap::identity(),
            Arc::new(|_, v| v),
            Arc::new(|_| 0.0),
        );
        let mk = |x: f64| SmoothJet { x, pos: [x, 0.0], d1: [1.0, 0.0], d2: [0.0, 0.0], normal: [0.0, -1.0] };
        for &(x, y) in &[(-0.5, 0.25), (0.1, 0.1 + 0.5 * f64::EPSILON), (0.3, 0.3), (0.2, 0.7)] {
            assert_eq!(rho_from_jets(&seg, &mk(x), &mk(y)).unwrap(), 0.0);
        }
        assert_eq!(rhs_g(&seg, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn rho_is_continuous_across_the_switches() {
        let p = BoundaryProblem::new(
            BoundaryCurve::ellipse(1.0, 2.0).unwrap(),
            SmoothingMap::identity(),
            Arc::new(|_, v| v),
            Arc::new(|_| 0.0),
        );
        for &y in &[-0.6, 0.05, 0.7] {
            let diag = rho_kernel(&p, y, y).unwrap();
            assert!((rho_kernel(&p, y + 2.0 * f64::EPSILON, y).unwrap() - diag).abs() <= 1e-14);
            for d in [1e-9, 1e-7, 1e-5] {
                assert!((rho_kernel(&p, y + d, y).unwrap() - diag).abs() <= 10.0 * d);
            }
            let inside = rho_kernel(&p, y + (1.0 - 1e-12) * MEAN_VELOCITY_RADIUS, y).unwrap();
            let outside = rho_kernel(&p, y + (1.0 + 1e-12) * MEAN_VELOCITY_RADIUS, y).unwrap();
            assert!((inside - outside).abs() <= 1e-12, "y={y}: {inside} vs {outside}");
            let k = k1_kernel(&p, y, y).unwrap();
            assert!((k1_kernel(&p, y + 1e-6, y).unwrap() - k).abs() <= 1e-4);
            assert!((k1_kernel(&p, y - 1e-6, y).unwrap() - k).abs() <= 1e-4);
        }
    }

    #[test]
    fn chain_rule_endpoints() {
        let p = BoundaryProblem::new(
            BoundaryCurve::ellipse(1.0, 2.0).unwrap(),
            SmoothingMap::integral(2.0).unwrap(),
            Arc::new(|_, v| v),
            Arc::new(|_| 0.0),
        );
        for x in [-1.0, 1.0] {
            let j = p.curve_eval(x);
            assert_eq!(j.d1, [0.0, 0.0]);
            assert!((j.normal[0] - 1.0).abs() < 1e-15);
        }
        let q1 = BoundaryProblem { map: SmoothingMap::identity(), ..p };
        assert_eq!(q1.curve_eval(-1.0).pos, [1.0, 0.0]);
    }

    #[test]
    fn unit_circle_rhs_vanishes_for_constant_data() {
        let p = circle_problem(1.0).with_rhs_nodes(256);
        let rhs = RhsEvaluator::new(&p).unwrap();
        assert_eq!(rhs.retained_coefficients(), 1);
        for &y in &[-0.9, -0.2, 0.0, 0.55] {
            assert!(rhs.eval(y).unwrap().abs() < 1e-13, "y={y}");
        }
        let smoothed = BoundaryProblem { map: SmoothingMap::integral(3.0).unwrap(), ..p };
        let rhs = RhsEvaluator::with_nodes(&smoothed, 1024).unwrap();
        for &y in &[-1.0, -0.2, 1.0] {
            assert!(rhs.eval(y).unwrap().abs() < 1e-13, "y={y}");
        }
        assert!(RhsEvaluator::new(&circle_problem(0.0)).unwrap().eval(0.3).unwrap() == 0.0);
    }
}
