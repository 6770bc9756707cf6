//! Upper concave envelope of a sampled function.

use crate::real::Real;

/// Indices of the vertices of the upper hull of `points`, which must be sorted
/// by strictly increasing abscissa. The first and last points are always
/// vertices. Collinear interior points are dropped.
pub fn upper_hull_indices<F: Real>(points: &[(F, F)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        while hull.len() >= 2 {
            let (o, a) = (points[hull[hull.len() - 2]], points[hull[hull.len() - 1]]);
            let b = points[i];
            // Cross product of (a - o) x (b - o); keep `a` only on a strict right turn.
            let cross = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
            if cross >= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Piecewise-linear evaluation of the hull through the given vertices.
pub fn eval_polyline<F: Real>(vertices: &[(F, F)], x: F) -> F {
    let n = vertices.len();
    if n == 0 {
        return F::nan();
    }
    if x <= vertices[0].0 {
        return vertices[0].1;
    }
    if x >= vertices[n - 1].0 {
        return vertices[n - 1].1;
    }
    let j = vertices.partition_point(|v| v.0 <= x);
    let (a, b) = (vertices[j - 1], vertices[j]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}
