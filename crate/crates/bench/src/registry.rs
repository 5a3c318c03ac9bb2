//! The examples and the tables they are checked against.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nystrom_core::laplace_bie::{BoundaryCurve, BoundaryProblem, Point, SmoothingMap};
use nystrom_core::nystrom::{HammersteinProblem, Nemytskii, SecondKernel};
use nystrom_core::SingularKernel;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex7,
    Ex8,
    Ex9,
    Bie1,
    Bie2,
    Bie3,
}

impl ExampleId {
    pub const ALL: [ExampleId; 10] = [
        ExampleId::Ex1,
        ExampleId::Ex2,
        ExampleId::Ex3,
        ExampleId::Ex4,
        ExampleId::Ex7,
        ExampleId::Ex8,
        ExampleId::Ex9,
        ExampleId::Bie1,
        ExampleId::Bie2,
        ExampleId::Bie3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex3 => "ex3",
            ExampleId::Ex4 => "ex4",
            ExampleId::Ex7 => "ex7",
            ExampleId::Ex8 => "ex8",
            ExampleId::Ex9 => "ex9",
            ExampleId::Bie1 => "bie1",
            ExampleId::Bie2 => "bie2",
            ExampleId::Bie3 => "bie3",
        }
    }

    pub fn spec(self) -> ExampleSpec {
        spec(self)
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| BenchError::UnknownExample(s.to_string()))
    }
}

/// One row of a published table. `error` is the interpolant error for
/// interval problems and the boundary-node error for boundary problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRow {
    pub m: usize,
    pub error: f64,
    pub interior: Option<f64>,
    pub iterations: Option<usize>,
    pub eoc: Option<f64>,
}

const fn row(m: usize, error: f64, iterations: usize, eoc: f64) -> TargetRow {
    TargetRow { m, error, interior: None, iterations: Some(iterations), eoc: Some(eoc) }
}

const fn plain(m: usize, error: f64, iterations: usize) -> TargetRow {
    TargetRow { m, error, interior: None, iterations: Some(iterations), eoc: None }
}

const fn bie(m: usize, boundary: f64, interior: f64) -> TargetRow {
    TargetRow { m, error: boundary, interior: Some(interior), iterations: None, eoc: None }
}

/// The published table for one smoothing exponent.
#[derive(Debug, Clone, Copy)]
pub struct TargetTable {
    pub q: f64,
    pub rows: &'static [TargetRow],
}

const EX1: &[TargetRow] = &[plain(4, 4.88e-8, 6), plain(8, 4.90e-16, 6)];
const EX2: &[TargetRow] = &[plain(4, 4.87e-3, 5), plain(8, 2.32e-7, 5), plain(16, 2.22e-16, 5)];
const EX3: &[TargetRow] = &[
    row(8, 2.35e-4, 4, 3.85),
    row(16, 2.15e-5, 4, 3.45),
    row(32, 1.98e-6, 4, 3.44),
    row(64, 1.79e-7, 4, 3.47),
    row(128, 1.59e-8, 4, 3.49),
    row(256, 1.30e-9, 4, 3.61),
];
const EX4: &[TargetRow] = &[
    row(8, 9.45e-4, 18, 7.96),
    row(16, 4.77e-5, 65, 4.31),
    row(32, 2.26e-6, 21, 4.40),
    row(64, 1.03e-7, 20, 4.45),
    row(128, 4.64e-9, 20, 4.48),
    row(256, 1.98e-10, 20, 4.55),
];
const EX7: &[TargetRow] = &[TargetRow { m: 4, error: 1.97e-14, interior: None, iterations: None, eoc: None }];
const EX8: &[TargetRow] = &[TargetRow { m: 4, error: 6.66e-16, interior: None, iterations: None, eoc: None }];
const EX9: &[TargetRow] = &[
    row(8, 2.93e-3, 6, 2.01),
    row(16, 7.81e-4, 6, 1.91),
    row(32, 2.03e-4, 6, 1.94),
    row(64, 5.16e-5, 6, 1.98),
    row(128, 1.25e-5, 6, 2.05),
    row(256, 2.51e-6, 6, 2.31),
];
const BIE1_Q1: &[TargetRow] = &[
    bie(8, 6.93e-2, 2.71e-1),
    bie(16, 2.36e-3, 5.94e-2),
    bie(32, 3.94e-4, 4.98e-3),
    bie(64, 1.01e-4, 3.65e-5),
    bie(128, 2.56e-5, 3.89e-8),
    bie(256, 6.44e-6, 2.45e-9),
    bie(512, 1.61e-6, 1.53e-10),
];
const BIE1_Q2: &[TargetRow] = &[
    bie(8, 4.59e-1, 3.58e-1),
    bie(16, 1.14e-2, 1.42e-1),
    bie(32, 6.60e-5, 1.48e-2),
    bie(64, 5.92e-7, 1.21e-3),
    bie(128, 3.76e-8, 2.59e-5),
    bie(256, 3.19e-9, 2.84e-9),
    bie(512, 1.98e-9, 1.71e-14),
];
const BIE2_Q1: &[TargetRow] = &[
    bie(8, 5.27e-1, 6.28e-1),
    bie(16, 5.65e-2, 9.57e-2),
    bie(32, 1.23e-3, 6.01e-3),
    bie(64, 7.58e-4, 2.23e-4),
    bie(128, 3.16e-4, 1.00e-6),
    bie(256, 9.89e-5, 4.54e-8),
    bie(512, 2.70e-5, 3.06e-9),
];
const BIE2_Q2: &[TargetRow] = &[
    bie(8, 6.71e-1, 8.71e-1),
    bie(16, 9.83e-2, 1.95e-1),
    bie(32, 1.84e-3, 1.52e-2),
    bie(64, 3.38e-5, 1.20e-3),
    bie(128, 6.53e-7, 2.60e-5),
    bie(256, 4.21e-8, 5.54e-9),
    bie(512, 1.53e-9, 3.18e-10),
];
const BIE3_Q1: &[TargetRow] = &[
    bie(16, 4.23e-1, 4.72e-1),
    bie(32, 1.99e-1, 1.09e-1),
    bie(64, 5.68e-3, 8.61e-3),
    bie(128, 3.25e-5, 1.38e-4),
    bie(256, 1.94e-7, 6.71e-8),
    bie(512, 4.86e-8, 1.42e-12),
];

/// How the error of an interval example is measured.
#[derive(Clone, Copy)]
pub enum Reference {
    /// Against a closed-form solution.
    Exact(fn(f64) -> f64),
    /// Against the Nyström interpolant of a fine solve.
    SelfReference,
}

#[derive(Clone, Copy)]
pub enum ExampleKind {
    Interval { build: fn() -> HammersteinProblem, reference: Reference },
    Boundary { build: fn(f64) -> nystrom_core::Result<BoundaryProblem>, exact: fn(Point) -> f64, default_q: f64 },
}

#[derive(Clone, Copy)]
pub struct ExampleSpec {
    pub id: ExampleId,
    pub description: &'static str,
    pub table: &'static str,
    pub default_m: &'static [usize],
    pub kind: ExampleKind,
    pub targets: &'static [TargetTable],
}

impl fmt::Debug for ExampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExampleSpec")
            .field("id", &self.id)
            .field("description", &self.description)
            .field("default_m", &self.default_m)
            .finish_non_exhaustive()
    }
}

impl ExampleSpec {
    pub fn is_boundary(&self) -> bool {
        matches!(self.kind, ExampleKind::Boundary { .. })
    }

    /// Smoothing exponent used when none is requested; `None` for interval
    /// problems.
    pub fn default_q(&self) -> Option<f64> {
        match self.kind {
            ExampleKind::Boundary { default_q, .. } => Some(default_q),
            ExampleKind::Interval { .. } => None,
        }
    }

    /// Published rows for the exponent `q` (ignored for interval problems).
    pub fn target_rows(&self, q: Option<f64>) -> Option<&'static [TargetRow]> {
        match q {
            Some(q) if self.is_boundary() => self.targets.iter().find(|t| t.q == q).map(|t| t.rows),
            _ => self.targets.first().map(|t| t.rows),
        }
    }
}

fn cubic() -> Nemytskii {
    Nemytskii::with_derivative(Arc::new(|_, v| v * v * v), Arc::new(|_, v| 3.0 * v * v))
}

fn rational() -> Nemytskii {
    Nemytskii::with_derivative(
        Arc::new(|_, v| 1.0 / (1.0 + v * v)),
        Arc::new(|_, v| -2.0 * v / (1.0 + v * v).powi(2)),
    )
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

fn example3() -> HammersteinProblem {
    HammersteinProblem::new(
        SecondKernel::Smooth(Arc::new(|x, y| (x + y).exp() * (x + 1.0).cos() / (x * x + 5.0))),
        rational(),
        Arc::new(|y: f64| y.abs().powf(2.5)),
    )
    .with_k1(Arc::new(|x: f64, y| y * x.cos()))
}

fn example4() -> HammersteinProblem {
    HammersteinProblem::new(
        SecondKernel::Smooth(Arc::new(|x: f64, y: f64| (x * y).abs().powf(3.5))),
        cubic(),
        Arc::new(|y: f64| y.exp() + (3.0 + y).ln()),
    )
    .with_k1(Arc::new(|x, y| x + y))
}

// right-hand side on [0,1] whose solution is sqrt(x(1-x))
fn example7_g(y: f64) -> f64 {
    let z = 1.0 - y;
    (y * z).sqrt() + 16.0 / 15.0 * y.powf(2.5) + 2.0 * y * y * z.sqrt() + 4.0 / 3.0 * y * z.powf(1.5)
        + 0.4 * z.powf(2.5)
        - 4.0 / 3.0 * y.powf(1.5)
        - 2.0 * y * z.sqrt()
        - 2.0 / 3.0 * z.powf(1.5)
}

fn example7() -> HammersteinProblem {
    let kernel = SingularKernel::algebraic(-0.5, Arc::new(|_| FRAC_1_SQRT_2)).expect("valid exponent");
    HammersteinProblem::new(
        SecondKernel::Singular(kernel),
        Nemytskii::with_derivative(Arc::new(|_, v| v * v), Arc::new(|_, v| 2.0 * v)),
        Arc::new(|s| example7_g(0.5 * (s + 1.0))),
    )
    .with_initial_guess(Arc::new(|_| 0.5))
}

fn example7_exact(s: f64) -> f64 {
    let x = 0.5 * (s + 1.0);
    (x * (1.0 - x)).sqrt()
}

fn example8() -> HammersteinProblem {
    HammersteinProblem::new(
        SecondKernel::BieComposite { rho: Arc::new(|_, _| 0.5 * LN_2), psi: Arc::new(|_| 0.5) },
        Nemytskii::with_derivative(Arc::new(|_, v| (PI * v).sin()), Arc::new(|_, v| PI * (PI * v).cos())),
        Arc::new(|_| 1.0),
    )
}

fn example9() -> HammersteinProblem {
    let kernel = SingularKernel::algebraic(-0.5, Arc::new(|_| 1.0)).expect("valid exponent");
    HammersteinProblem::new(SecondKernel::Singular(kernel), rational(), Arc::new(|y| (y + 1.0).sqrt()))
        .with_k1(Arc::new(|x, y| x * x * y))
}

fn ellipse_u(p: Point) -> f64 {
    p[0].exp() * p[1].cos()
}

fn ellipse_grad(p: Point) -> Point {
    [p[0].exp() * p[1].cos(), -p[0].exp() * p[1].sin()]
}

fn amoeba_u(p: Point) -> f64 {
    p[0].sin() * p[1].cosh()
}

fn amoeba_grad(p: Point) -> Point {
    [p[0].cos() * p[1].cosh(), p[0].sin() * p[1].sinh()]
}

fn bie1(q: f64) -> nystrom_core::Result<BoundaryProblem> {
    Ok(BoundaryProblem::manufactured(
        BoundaryCurve::ellipse(1.0, 2.0)?,
        SmoothingMap::integral(q)?,
        Arc::new(|_, v| v + v.sin()),
        Some(Arc::new(|_, v| 1.0 + v.cos())),
        Arc::new(ellipse_u),
        Arc::new(ellipse_grad),
    ))
}

fn bie2(q: f64) -> nystrom_core::Result<BoundaryProblem> {
    Ok(BoundaryProblem::manufactured(
        BoundaryCurve::ellipse(1.0, 2.0)?,
        SmoothingMap::integral(q)?,
        Arc::new(|_, v| v.abs() * v * v * v),
        Some(Arc::new(|_, v| 4.0 * v.abs() * v * v)),
        Arc::new(ellipse_u),
        Arc::new(ellipse_grad),
    ))
}

fn bie3(q: f64) -> nystrom_core::Result<BoundaryProblem> {
    Ok(BoundaryProblem::manufactured(
        BoundaryCurve::amoeba()?,
        SmoothingMap::integral(q)?,
        Arc::new(|_, v| v * v * v),
        Some(Arc::new(|_, v| 3.0 * v * v)),
        Arc::new(amoeba_u),
        Arc::new(amoeba_grad),
    ))
}

const INTERVAL_ORDERS: &[usize] = &[4, 8, 16, 32, 64, 128, 256];

fn spec(id: ExampleId) -> ExampleSpec {
    let interval = |build, reference| ExampleKind::Interval { build, reference };
    let (description, table, default_m, kind, targets): (_, _, &'static [usize], _, &'static [TargetTable]) = match id {
        ExampleId::Ex1 => (
            "smooth kernel e^(y-2x), h = f^3, exact f = e^y",
            "Table 1 (left)",
            &[4, 8],
            interval(example1 as fn() -> HammersteinProblem, Reference::Exact(f64::exp)),
            &[TargetTable { q: 1.0, rows: EX1 }],
        ),
        ExampleId::Ex2 => (
            "smooth kernel y cos(pi x/2), h = e^f, exact f = sin(pi y/2)",
            "Table 1 (right)",
            &[4, 8, 16],
            interval(example2, Reference::Exact(|y| (PI * y / 2.0).sin())),
            &[TargetTable { q: 1.0, rows: EX2 }],
        ),
        ExampleId::Ex3 => (
            "k1 = y cos x, smooth k2, h = 1/(1+f^2), g = |y|^(5/2); reference f_512",
            "Table 2 (left)",
            INTERVAL_ORDERS,
            interval(example3, Reference::SelfReference),
            &[TargetTable { q: 1.0, rows: EX3 }],
        ),
        ExampleId::Ex4 => (
            "k1 = x+y, k2 = |xy|^(7/2), h = f^3, g = e^y + log(3+y); reference f_512",
            "Table 2 (right)",
            INTERVAL_ORDERS,
            interval(example4, Reference::SelfReference),
            &[TargetTable { q: 1.0, rows: EX4 }],
        ),
        ExampleId::Ex7 => (
            "|x-y|^(-1/2) on [0,1], h = f^2, exact f = sqrt(x(1-x))",
            "Section 5.1",
            &[4],
            interval(example7, Reference::Exact(example7_exact)),
            &[TargetTable { q: 1.0, rows: EX7 }],
        ),
        ExampleId::Ex8 => (
            "constant rho plus logarithmic kernel, h = sin(pi f), exact f = 1",
            "Section 5.1",
            &[4],
            interval(example8, Reference::Exact(|_| 1.0)),
            &[TargetTable { q: 1.0, rows: EX8 }],
        ),
        ExampleId::Ex9 => (
            "k1 = x^2 y, |x-y|^(-1/2), h = 1/(1+f^2), g = sqrt(y+1); reference f_512",
            "Table 3",
            INTERVAL_ORDERS,
            interval(example9, Reference::SelfReference),
            &[TargetTable { q: 1.0, rows: EX9 }],
        ),
        ExampleId::Bie1 => (
            "Laplace BIE on the ellipse (1,2), h = v + sin v, u = e^x cos y",
            "Table 4",
            &[8, 16, 32, 64, 128, 256, 512],
            ExampleKind::Boundary { build: bie1, exact: ellipse_u, default_q: 2.0 },
            &[TargetTable { q: 1.0, rows: BIE1_Q1 }, TargetTable { q: 2.0, rows: BIE1_Q2 }],
        ),
        ExampleId::Bie2 => (
            "Laplace BIE on the ellipse (1,2), h = |v| v^3, u = e^x cos y",
            "Table 5",
            &[8, 16, 32, 64, 128, 256, 512],
            ExampleKind::Boundary { build: bie2, exact: ellipse_u, default_q: 2.0 },
            &[TargetTable { q: 1.0, rows: BIE2_Q1 }, TargetTable { q: 2.0, rows: BIE2_Q2 }],
        ),
        ExampleId::Bie3 => (
            "Laplace BIE on the amoeba, h = v^3, u = sin x cosh y",
            "Table 6",
            &[16, 32, 64, 128, 256, 512],
            ExampleKind::Boundary { build: bie3, exact: amoeba_u, default_q: 1.0 },
            &[TargetTable { q: 1.0, rows: BIE3_Q1 }],
        ),
    };
    ExampleSpec { id, description, table, default_m, kind, targets }
}

/// Every registered example, in id order.
pub fn registry() -> Vec<ExampleSpec> {
    ExampleId::ALL.into_iter().map(spec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExampleId::ALL {
            assert_eq!(id.as_str().parse::<ExampleId>().unwrap(), id);
        }
        assert!(matches!("ex5".parse::<ExampleId>(), Err(BenchError::UnknownExample(_))));
    }

    #[test]
    fn target_rows_are_sorted_doublings() {
        for spec in registry() {
            for table in spec.targets {
                for w in table.rows.windows(2) {
                    assert_eq!(w[1].m, 2 * w[0].m, "{}", spec.id);
                }
            }
        }
    }

    #[test]
    fn boundary_tables_depend_on_q() {
        let bie1 = ExampleId::Bie1.spec();
        assert_eq!(bie1.target_rows(Some(2.0)).unwrap()[6].interior, Some(1.71e-14));
        assert_eq!(bie1.target_rows(Some(1.0)).unwrap()[6].error, 1.61e-6);
        assert!(ExampleId::Bie3.spec().target_rows(Some(2.0)).is_none());
    }
}
