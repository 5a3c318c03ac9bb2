use nystrom_core::laplace_bie::{BoundaryCurve, Point};

use crate::error::{BenchError, Result};
use crate::rng::SplitMix64;

/// Minimum distance from the boundary for interior evaluation points.
pub const INTERIOR_BAND: f64 = 0.1;

/// Maximum number of candidate points drawn before sampling gives up.
pub const SAMPLING_BUDGET: u64 = 1_000_000;

// distance from p to every polygon edge is at least band
fn clears_band(polygon: &[Point], p: Point, band: f64) -> bool {
    let band2 = band * band;
    let n = polygon.len();
    (0..n).all(|i| {
        let (a, b) = (polygon[i], polygon[(i + 1) % n]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let (ex, ey) = (p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
        ex * ex + ey * ey >= band2
    })
}

/// `n` points drawn uniformly from the bounding box of `curve` and kept when
/// they lie inside the curve at distance at least [`INTERIOR_BAND`] from it.
///
/// Each candidate consumes two draws, `x` first. The inside test is the
/// winding number of the 2048-vertex polygon and the distance is measured
/// to the same polygon.
pub fn sample_interior_points(curve: &BoundaryCurve, n: usize, seed: u64) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(BenchError::InvalidOrders("the number of interior points must be at least 1".into()));
    }
    let [x0, y0, x1, y1] = curve.bounding_box();
    let mut rng = SplitMix64::new(seed);
    let mut points = Vec::with_capacity(n);
    let mut draws = 0;
    while points.len() < n {
        if draws == SAMPLING_BUDGET {
            return Err(BenchError::SamplingBudget { draws, found: points.len(), wanted: n });
        }
        draws += 1;
        let p = [x0 + (x1 - x0) * rng.next_f64(), y0 + (y1 - y0) * rng.next_f64()];
        if curve.contains(p) && clears_band(curve.polygon(), p, INTERIOR_BAND) {
            points.push(p);
        }
    }
    Ok(points)
}
