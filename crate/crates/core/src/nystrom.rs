//! Nyström discretization of Hammerstein equations
//!
//! ```text
//! f(y) - ∫ k1(x,y) f(x) dx - ∫ k2(x,y) h(x, f(x)) dx = g(y)
//! ```
//!
//! collocated at the Gauss–Legendre nodes, solved by damped Newton, and
//! extended to all of `[-1,1]` by the Nyström interpolant.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::gauss_legendre::QuadratureRule;
use crate::linalg::Matrix;
use crate::newton::{max_norm, newton_solve, NewtonOptions, NonlinearSystem};
use crate::singular_moments::{KernelKind, ProductRule, RealFn, SingularKernel};

/// Kernel `(x, y) -> k(x, y)`; `x` is the integration variable.
pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Function of `(x, v)`.
pub type Bivariate = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Number of points of the error grid, endpoints included.
pub const ERROR_GRID_POINTS: usize = 100;

/// The superposition operator `(Hf)(x) = h(x, f(x))` and its derivative in
/// the second argument.
#[derive(Clone)]
pub struct Nemytskii {
    h: Bivariate,
    h_v: Option<Bivariate>,
}

impl std::fmt::Debug for Nemytskii {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nemytskii")
            .field("analytic_derivative", &self.h_v.is_some())
            .finish_non_exhaustive()
    }
}

impl Nemytskii {
    /// `h` without a derivative; `h_v` falls back to a central difference.
    pub fn new(h: Bivariate) -> Self {
        Self { h, h_v: None }
    }

    pub fn with_derivative(h: Bivariate, h_v: Bivariate) -> Self {
        Self { h, h_v: Some(h_v) }
    }

    /// `h(x, v) = v`.
    pub fn identity() -> Self {
        Self::with_derivative(Arc::new(|_, v| v), Arc::new(|_, _| 1.0))
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        (self.h)(x, v)
    }

    /// `∂h/∂v`, analytic when supplied, otherwise a central difference with
    /// step `ε^{1/3} max(1, |v|)`.
    pub fn derivative(&self, x: f64, v: f64) -> f64 {
        match &self.h_v {
            Some(d) => d(x, v),
            None => {
                let step = f64::EPSILON.cbrt() * v.abs().max(1.0);
                ((self.h)(x, v + step) - (self.h)(x, v - step)) / (2.0 * step)
            }
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.h_v.is_some()
    }
}

/// The kernel multiplying the nonlinear term.
#[derive(Clone)]
pub enum SecondKernel {
    /// Continuous `k2(x, y)`, discretized with the Gauss rule.
    Smooth(Kernel),
    /// `ψ(x) k*(|x-y|)`, discretized with the product rule.
    Singular(SingularKernel),
    /// `ρ(x, y) + ψ(x) log|x-y|`: Gauss rule for `ρ`, product rule for the
    /// logarithm.
    BieComposite { rho: Kernel, psi: RealFn },
}

impl std::fmt::Debug for SecondKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Smooth(_) => f.write_str("Smooth"),
            Self::Singular(k) => f.debug_tuple("Singular").field(k).finish(),
            Self::BieComposite { .. } => f.write_str("BieComposite"),
        }
    }
}

impl SecondKernel {
    fn singular_kind(&self) -> Option<KernelKind> {
        match self {
            Self::Smooth(_) => None,
            Self::Singular(k) => Some(k.kind()),
            Self::BieComposite { .. } => Some(KernelKind::Logarithmic),
        }
    }
}

/// Data of one equation. A missing `k1` stands for `k1 ≡ 0`; a missing
/// `initial_guess` makes Newton start from `g` at the nodes.
#[derive(Clone, Debug)]
pub struct HammersteinProblem {
    pub k1: Option<KernelFn>,
    pub second_kernel: SecondKernel,
    pub nemytskii: Nemytskii,
    pub g: GFn,
    pub initial_guess: Option<GFn>,
}

/// Newtype wrappers so that the problem can derive `Debug`.
#[derive(Clone)]
pub struct KernelFn(pub Kernel);

#[derive(Clone)]
pub struct GFn(pub RealFn);

impl std::fmt::Debug for KernelFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("KernelFn")
    }
}

impl std::fmt::Debug for GFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GFn")
    }
}

impl HammersteinProblem {
    pub fn new(second_kernel: SecondKernel, nemytskii: Nemytskii, g: RealFn) -> Self {
        Self { k1: None, second_kernel, nemytskii, g: GFn(g), initial_guess: None }
    }

    /// Starting values for Newton, for equations with several solutions.
    pub fn with_initial_guess(mut self, guess: RealFn) -> Self {
        self.initial_guess = Some(GFn(guess));
        self
    }

    pub fn with_k1(mut self, k1: Kernel) -> Self {
        self.k1 = Some(KernelFn(k1));
        self
    }

    pub fn g(&self, y: f64) -> f64 {
        (self.g.0)(y)
    }

    pub fn k1(&self, x: f64, y: f64) -> f64 {
        self.k1.as_ref().map_or(0.0, |k| (k.0)(x, y))
    }
}

/// The collocated system `F(a) = A a - W h(x, a) - g`, with `A` and `W`
/// evaluated once.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    rule: Arc<QuadratureRule>,
    nemytskii: Nemytskii,
    // A[i][k] = δ_ik - λ_k k1(x_k, x_i)
    linear: Matrix,
    // W[i][k] = w_k(x_i)
    weights: Matrix,
    rhs: Vec<f64>,
    moment_fallbacks: usize,
}

impl CollocationSystem {
    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn linear_part(&self) -> &Matrix {
        &self.linear
    }

    pub fn nonlinear_weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Collocation points whose moments needed the adaptive fallback.
    pub fn moment_fallbacks(&self) -> usize {
        self.moment_fallbacks
    }

    fn nonlinear_values(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.rule
            .nodes()
            .iter()
            .zip(a)
            .map(|(&x, &v)| {
                let h = self.nemytskii.eval(x, v);
                if h.is_finite() {
                    Ok(h)
                } else {
                    Err(Error::NonFinite { what: "nonlinearity h", x })
                }
            })
            .collect()
    }
}

impl NonlinearSystem for CollocationSystem {
    fn dim(&self) -> usize {
        self.rule.order()
    }

    fn residual(&self, a: &[f64]) -> Result<Vec<f64>> {
        let h = self.nonlinear_values(a)?;
        let la = self.linear.mul_vec(a);
        let wh = self.weights.mul_vec(&h);
        Ok(la.iter().zip(&wh).zip(&self.rhs).map(|((l, w), g)| l - w - g).collect())
    }

    // max_i (|g_i| + Σ_k |A_ik a_k| + Σ_k |W_ik h_k|)
    fn residual_scale(&self, a: &[f64]) -> Result<f64> {
        let h = self.nonlinear_values(a)?;
        let row_sum = |row: &[f64], v: &[f64]| row.iter().zip(v).map(|(r, x)| (r * x).abs()).sum::<f64>();
        Ok((0..self.dim())
            .map(|i| self.rhs[i].abs() + row_sum(self.linear.row(i), a) + row_sum(self.weights.row(i), &h))
            .fold(0.0, f64::max))
    }

    fn jacobian(&self, a: &[f64]) -> Result<Matrix> {
        let m = self.dim();
        let dh: Vec<f64> = self
            .rule
            .nodes()
            .iter()
            .zip(a)
            .map(|(&x, &v)| self.nemytskii.derivative(x, v))
            .collect();
        if let Some(k) = dh.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite { what: "derivative h_v", x: self.rule.nodes()[k] });
        }
        let mut jac = self.linear.clone();
        for i in 0..m {
            let w = self.weights.row(i);
            for (k, j) in jac.row_mut(i).iter_mut().enumerate() {
                *j -= w[k] * dh[k];
            }
        }
        Ok(jac)
    }
}

fn check_entry(v: f64, what: &'static str, node: usize, row: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Assembly { what, node, row })
    }
}

/// Evaluates `ψ` at the nodes for the singular part, if any.
fn psi_at_nodes(kernel: &SecondKernel, rule: &QuadratureRule) -> Result<Option<Vec<f64>>> {
    let psi: Box<dyn Fn(f64) -> f64> = match kernel {
        SecondKernel::Smooth(_) => return Ok(None),
        SecondKernel::Singular(k) => {
            let k = k.clone();
            Box::new(move |x| k.psi(x))
        }
        SecondKernel::BieComposite { psi, .. } => {
            let psi = psi.clone();
            Box::new(move |x| psi(x))
        }
    };
    rule.nodes()
        .iter()
        .enumerate()
        .map(|(k, &x)| check_entry(psi(x), "psi", k, 0))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Builds the collocated system of `problem` on `rule`.
pub fn assemble_system(problem: &HammersteinProblem, rule: Arc<QuadratureRule>) -> Result<CollocationSystem> {
    let m = rule.order();
    let nodes = rule.nodes();
    let lambda = rule.weights();

    let mut linear = Matrix::identity(m);
    if problem.k1.is_some() {
        for i in 0..m {
            for k in 0..m {
                let v = check_entry(problem.k1(nodes[k], nodes[i]), "k1", k, i)?;
                linear[(i, k)] -= lambda[k] * v;
            }
        }
    }

    let psi = psi_at_nodes(&problem.second_kernel, &rule)?;
    let product = match problem.second_kernel.singular_kind() {
        Some(kind) => Some(ProductRule::new(rule.clone(), kind)?),
        None => None,
    };
    let mut weights = Matrix::zeros(m, m);
    let mut moment_fallbacks = 0;
    for i in 0..m {
        let y = nodes[i];
        let row = weights.row_mut(i);
        match &problem.second_kernel {
            SecondKernel::Smooth(k2) => {
                for k in 0..m {
                    row[k] = lambda[k] * check_entry(k2(nodes[k], y), "k2", k, i)?;
                }
            }
            SecondKernel::Singular(_) | SecondKernel::BieComposite { .. } => {
                let product = product.as_ref().expect("product rule for singular kernel");
                let psi = psi.as_ref().expect("psi samples for singular kernel");
                let pw = product.weights(y)?;
                moment_fallbacks += usize::from(pw.used_fallback);
                for k in 0..m {
                    row[k] = check_entry(pw.c[k], "product weight", k, i)? * psi[k];
                }
                if let SecondKernel::BieComposite { rho, .. } = &problem.second_kernel {
                    for k in 0..m {
                        row[k] += lambda[k] * check_entry(rho(nodes[k], y), "rho", k, i)?;
                    }
                }
            }
        }
    }

    let rhs = nodes
        .iter()
        .enumerate()
        .map(|(i, &y)| check_entry(problem.g(y), "g", i, i))
        .collect::<Result<Vec<_>>>()?;

    Ok(CollocationSystem {
        rule,
        nemytskii: problem.nemytskii.clone(),
        linear,
        weights,
        rhs,
        moment_fallbacks,
    })
}

/// Node values of the discrete solution plus what is needed to evaluate the
/// Nyström interpolant.
#[derive(Debug, Clone)]
pub struct NystromSolution {
    pub rule: Arc<QuadratureRule>,
    /// `a*_k = f_m(x_k)`.
    pub a: Vec<f64>,
    pub problem: HammersteinProblem,
    pub iterations: usize,
    pub residual_norm: f64,
    pub moment_fallbacks: usize,
    // h(x_k, a*_k)
    h_values: Vec<f64>,
    // ψ(x_k) h(x_k, a*_k) for the singular part
    psi_h: Option<Vec<f64>>,
    product: Option<ProductRule>,
}

impl NystromSolution {
    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    /// `h(x_k, a*_k)`.
    pub fn nonlinear_values(&self) -> &[f64] {
        &self.h_values
    }

    /// The Nyström interpolant
    /// `f_m(y) = Σ λ_k k1(x_k,y) a*_k + Σ w_k(y) h(x_k,a*_k) + g(y)`.
    pub fn interpolant_eval(&self, y: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&y) {
            return Err(invalid(format!("evaluation point must lie in [-1,1], got {y}")));
        }
        let nodes = self.rule.nodes();
        let lambda = self.rule.weights();
        let mut sum = self.problem.g(y);
        if self.problem.k1.is_some() {
            for k in 0..nodes.len() {
                sum += lambda[k] * self.problem.k1(nodes[k], y) * self.a[k];
            }
        }
        match &self.problem.second_kernel {
            SecondKernel::Smooth(k2) => {
                for k in 0..nodes.len() {
                    sum += lambda[k] * k2(nodes[k], y) * self.h_values[k];
                }
            }
            SecondKernel::Singular(_) | SecondKernel::BieComposite { .. } => {
                let product = self.product.as_ref().expect("product rule for singular kernel");
                let psi_h = self.psi_h.as_ref().expect("psi samples for singular kernel");
                let pw = product.weights(y)?;
                sum += pw.c.iter().zip(psi_h).map(|(c, v)| c * v).sum::<f64>();
                if let SecondKernel::BieComposite { rho, .. } = &self.problem.second_kernel {
                    for k in 0..nodes.len() {
                        sum += lambda[k] * rho(nodes[k], y) * self.h_values[k];
                    }
                }
            }
        }
        if sum.is_finite() {
            Ok(sum)
        } else {
            Err(Error::NonFinite { what: "Nyström interpolant", x: y })
        }
    }
}

/// Solves `problem` with the `m`-point rule, starting Newton from `g(nodes)`
/// unless the problem carries its own initial guess.
pub fn solve(problem: &HammersteinProblem, m: usize) -> Result<NystromSolution> {
    solve_with(problem, m, NewtonOptions::default())
}

pub fn solve_with(problem: &HammersteinProblem, m: usize, opts: NewtonOptions) -> Result<NystromSolution> {
    let rule = Arc::new(QuadratureRule::new(m)?);
    let system = assemble_system(problem, rule.clone())?;
    let initial = match &problem.initial_guess {
        Some(guess) => rule.nodes().iter().map(|&x| (guess.0)(x)).collect(),
        None => system.rhs().to_vec(),
    };
    let outcome = newton_solve(&system, &initial, opts)?;
    let h_values = system.nonlinear_values(&outcome.solution)?;
    let psi_h = psi_at_nodes(&problem.second_kernel, &rule)?
        .map(|psi| psi.iter().zip(&h_values).map(|(p, h)| p * h).collect());
    let product = match problem.second_kernel.singular_kind() {
        Some(kind) => Some(ProductRule::new(rule.clone(), kind)?),
        None => None,
    };
    Ok(NystromSolution {
        rule,
        a: outcome.solution,
        problem: problem.clone(),
        iterations: outcome.iterations,
        residual_norm: outcome.residual_norm,
        moment_fallbacks: system.moment_fallbacks(),
        h_values,
        psi_h,
        product,
    })
}

/// The equispaced error grid `y_i = -1 + 2 i / 99`, endpoints included.
pub fn error_grid() -> Vec<f64> {
    (0..ERROR_GRID_POINTS)
        .map(|i| {
            if i + 1 == ERROR_GRID_POINTS {
                1.0
            } else {
                -1.0 + 2.0 * i as f64 / (ERROR_GRID_POINTS - 1) as f64
            }
        })
        .collect()
}

/// `max |reference - approx| / max |reference|` over paired samples.
pub fn relative_error_values(approx: &[f64], reference: &[f64]) -> Result<f64> {
    if approx.len() != reference.len() || approx.is_empty() {
        return Err(invalid("sample vectors must be non-empty and of equal length"));
    }
    let scale = max_norm(reference);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Computation(format!(
            "reference maximum is {scale}; relative error undefined"
        )));
    }
    let diff = approx.iter().zip(reference).fold(0.0f64, |m, (a, r)| m.max((a - r).abs()));
    Ok(diff / scale)
}

/// Relative grid error of the Nyström interpolant against `reference`.
pub fn relative_error<F: Fn(f64) -> f64>(sol: &NystromSolution, reference: F) -> Result<f64> {
    let grid = error_grid();
    let approx = grid.iter().map(|&y| sol.interpolant_eval(y)).collect::<Result<Vec<_>>>()?;
    let exact: Vec<f64> = grid.iter().map(|&y| reference(y)).collect();
    relative_error_values(&approx, &exact)
}

/// `EOC_m = log(E_m / E_{2m}) / log 2` for consecutive pairs.
pub fn eoc(errors: &[(usize, f64)]) -> Result<Vec<f64>> {
    errors
        .windows(2)
        .map(|w| {
            let ((m0, e0), (m1, e1)) = (w[0], w[1]);
            if m1 != 2 * m0 {
                return Err(invalid(format!("orders {m0} and {m1} are not a doubling")));
            }
            Ok((e0 / e1).ln() / std::f64::consts::LN_2)
        })
        .collect()
}
