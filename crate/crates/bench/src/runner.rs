use std::time::Instant;

use nystrom_core::laplace_bie::{solve_bie, BoundaryProblem, Point, PotentialEvaluator};
use nystrom_core::nystrom::{error_grid, relative_error_values, solve, HammersteinProblem, NystromSolution};
use nystrom_core::{eoc, Error as CoreError};

use crate::error::{BenchError, Result};
use crate::registry::{ExampleId, ExampleKind, Reference};
use crate::report::{ConvergenceReport, ReportMetadata, ReportRow};
use crate::sampling::{sample_interior_points, INTERIOR_BAND};

/// Smallest order accepted by the boundary solver.
const MIN_BOUNDARY_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Seed of the interior sample set (boundary problems only).
    pub seed: u64,
    /// Smoothing exponent; `None` picks the example's default.
    pub q: Option<f64>,
    /// Order of the reference solve for examples without a closed form.
    pub ref_m: usize,
    pub interior_points: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 42, q: None, ref_m: 512, interior_points: 600 }
    }
}

fn check_orders(m_list: &[usize], min: usize) -> Result<()> {
    if m_list.is_empty() {
        return Err(BenchError::InvalidOrders("no orders given".into()));
    }
    if let Some(&m) = m_list.iter().find(|&&m| m < min) {
        return Err(BenchError::InvalidOrders(format!("order {m} is below the minimum {min}")));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BenchError::InvalidOrders("orders must be strictly increasing".into()));
    }
    Ok(())
}

/// Failures that are reported in the row instead of aborting the run.
fn row_failure(err: &CoreError) -> Option<Option<usize>> {
    match err {
        CoreError::NonConvergence { iterations, .. } => Some(Some(*iterations)),
        CoreError::SingularJacobian { .. } => Some(None),
        _ => None,
    }
}

fn failed_row(m: usize, iterations: Option<usize>) -> ReportRow {
    ReportRow { m, error: None, interior: None, iterations, eoc: None, converged: false }
}

// EOC of each row against the row with half its order, when both exist
fn fill_eoc(rows: &mut [ReportRow]) -> Result<()> {
    for i in 0..rows.len() {
        let (m, Some(e1)) = (rows[i].m, rows[i].error) else { continue };
        if m % 2 != 0 {
            continue;
        }
        let coarse = rows[..i].iter().find(|r| r.m == m / 2).and_then(|r| r.error);
        if let Some(e0) = coarse {
            let value = eoc(&[(m / 2, e0), (m, e1)])?[0];
            rows[i].eoc = value.is_finite().then_some(value);
        }
    }
    Ok(())
}

fn grid_values(sol: &NystromSolution, grid: &[f64]) -> nystrom_core::Result<Vec<f64>> {
    grid.iter().map(|&y| sol.interpolant_eval(y)).collect()
}

fn run_interval(
    build: fn() -> HammersteinProblem,
    reference: Reference,
    m_list: &[usize],
    opts: &RunOptions,
) -> Result<(Vec<ReportRow>, String)> {
    check_orders(m_list, 1)?;
    let problem = build();
    let grid = error_grid();
    let (exact, mode) = match reference {
        Reference::Exact(f) => (grid.iter().map(|&y| f(y)).collect::<Vec<_>>(), "exact".to_string()),
        Reference::SelfReference => {
            let fine = solve(&problem, opts.ref_m)
                .and_then(|sol| grid_values(&sol, &grid))
                .map_err(|source| BenchError::Reference { m: opts.ref_m, source })?;
            (fine, format!("f_{}", opts.ref_m))
        }
    };
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        match solve(&problem, m) {
            Ok(sol) => {
                let error = relative_error_values(&grid_values(&sol, &grid)?, &exact)?;
                rows.push(ReportRow {
                    m,
                    error: Some(error),
                    interior: None,
                    iterations: Some(sol.iterations),
                    eoc: None,
                    converged: true,
                });
            }
            Err(err) => match row_failure(&err) {
                Some(iterations) => rows.push(failed_row(m, iterations)),
                None => return Err(err.into()),
            },
        }
    }
    Ok((rows, mode))
}

/// Maximum error at the collocation nodes and at `points`.
pub fn boundary_errors(
    problem: &BoundaryProblem,
    sol: &NystromSolution,
    exact: fn(Point) -> f64,
    points: &[Point],
) -> Result<(f64, f64)> {
    let nodes = sol
        .nodes()
        .iter()
        .zip(&sol.a)
        .map(|(&x, a)| (exact(problem.curve_eval(x).pos) - a).abs())
        .fold(0.0, f64::max);
    let potential = PotentialEvaluator::new(problem, sol)?;
    let mut interior = 0.0f64;
    for &p in points {
        interior = interior.max((exact(p) - potential.eval(p)?).abs());
    }
    Ok((nodes, interior))
}

fn run_boundary(
    build: fn(f64) -> nystrom_core::Result<BoundaryProblem>,
    exact: fn(Point) -> f64,
    q: f64,
    m_list: &[usize],
    opts: &RunOptions,
) -> Result<Vec<ReportRow>> {
    check_orders(m_list, MIN_BOUNDARY_ORDER)?;
    let problem = build(q)?;
    let points = sample_interior_points(&problem.curve, opts.interior_points, opts.seed)?;
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        match solve_bie(&problem, m) {
            Ok(sol) => {
                let (nodes, interior) = boundary_errors(&problem, &sol, exact, &points)?;
                rows.push(ReportRow {
                    m,
                    error: Some(nodes),
                    interior: Some(interior),
                    iterations: Some(sol.iterations),
                    eoc: None,
                    converged: true,
                });
            }
            Err(err) => match row_failure(&err) {
                Some(iterations) => rows.push(failed_row(m, iterations)),
                None => return Err(err.into()),
            },
        }
    }
    Ok(rows)
}

/// Solves example `id` for every order in `m_list` (strictly increasing)
/// and tabulates the errors.
///
/// Interval problems report the relative grid error against the closed-form
/// solution or, when there is none, against the interpolant at
/// `opts.ref_m`. Boundary problems report the maximum error at the
/// collocation nodes and at `opts.interior_points` seeded interior points.
/// The EOC of a row is computed against the row with half its order.
pub fn run_example(id: ExampleId, m_list: &[usize], opts: &RunOptions) -> Result<ConvergenceReport> {
    let spec = id.spec();
    let start = Instant::now();
    let (mut rows, reference, q, interior_points) = match spec.kind {
        ExampleKind::Interval { build, reference } => {
            let (rows, mode) = run_interval(build, reference, m_list, opts)?;
            (rows, mode, None, None)
        }
        ExampleKind::Boundary { build, exact, default_q } => {
            let q = opts.q.unwrap_or(default_q);
            let rows = run_boundary(build, exact, q, m_list, opts)?;
            (rows, "exact".to_string(), Some(q), Some((opts.interior_points, INTERIOR_BAND)))
        }
    };
    fill_eoc(&mut rows)?;
    Ok(ConvergenceReport {
        metadata: ReportMetadata {
            example: id.to_string(),
            seed: opts.seed,
            q,
            reference,
            interior_points,
            wall_time: start.elapsed(),
        },
        boundary: spec.is_boundary(),
        rows,
    })
}
