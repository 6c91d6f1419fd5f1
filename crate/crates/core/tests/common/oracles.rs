//! Reference computations that share no code path with the library.

#![allow(dead_code)]

use drawjectory_core::Point;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Natural cubic spline coefficients `[a, b, c, d]` per segment from a dense
/// LU solve of every interpolation, continuity and boundary condition.
pub fn dense_spline_coefficients(xs: &[f64], ys: &[f64]) -> Vec<[f64; 4]> {
    let segs = xs.len() - 1;
    let unknowns = 4 * segs;
    let mut m = DMatrix::<f64>::zeros(unknowns, unknowns);
    let mut rhs = DVector::<f64>::zeros(unknowns);
    let mut row = 0;
    let col = |seg: usize, k: usize| 4 * seg + k; // k: 0=a 1=b 2=c 3=d
    for i in 0..segs {
        let h = xs[i + 1] - xs[i];
        // s_i(x_i) = y_i
        m[(row, col(i, 3))] = 1.0;
        rhs[row] = ys[i];
        row += 1;
        // s_i(x_{i+1}) = y_{i+1}
        m[(row, col(i, 0))] = h * h * h;
        m[(row, col(i, 1))] = h * h;
        m[(row, col(i, 2))] = h;
        m[(row, col(i, 3))] = 1.0;
        rhs[row] = ys[i + 1];
        row += 1;
        if i + 1 < segs {
            // s_i'(x_{i+1}) = s_{i+1}'(x_{i+1})
            m[(row, col(i, 0))] = 3.0 * h * h;
            m[(row, col(i, 1))] = 2.0 * h;
            m[(row, col(i, 2))] = 1.0;
            m[(row, col(i + 1, 2))] = -1.0;
            row += 1;
            // s_i''(x_{i+1}) = s_{i+1}''(x_{i+1})
            m[(row, col(i, 0))] = 6.0 * h;
            m[(row, col(i, 1))] = 2.0;
            m[(row, col(i + 1, 1))] = -2.0;
            row += 1;
        }
    }
    // natural ends
    m[(row, col(0, 1))] = 2.0;
    row += 1;
    let h = xs[segs] - xs[segs - 1];
    m[(row, col(segs - 1, 0))] = 6.0 * h;
    m[(row, col(segs - 1, 1))] = 2.0;
    row += 1;
    assert_eq!(row, unknowns);
    let sol = m.lu().solve(&rhs).expect("non-singular spline system");
    (0..segs).map(|i| [sol[col(i, 0)], sol[col(i, 1)], sol[col(i, 2)], sol[col(i, 3)]]).collect()
}

pub fn dist(p: Point, q: Point) -> f64 {
    let (dx, dy, dz) = (p.x - q.x, p.y - q.y, p.z - q.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn naive_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let mut h: f64 = 0.0;
    for p in a {
        let mut best = f64::INFINITY;
        for q in b {
            best = best.min(dist(*p, *q));
        }
        h = h.max(best);
    }
    let mut g: f64 = 0.0;
    for q in b {
        let mut best = f64::INFINITY;
        for p in a {
            best = best.min(dist(*p, *q));
        }
        g = g.max(best);
    }
    h.max(g)
}

/// Walks every monotone, continuous alignment from (0, 0) to the last pair
/// and reports (min over paths of summed cost, min over paths of max cost).
pub fn enumerate_alignments(a: &[Point], b: &[Point]) -> (f64, f64) {
    fn walk(a: &[Point], b: &[Point], i: usize, j: usize, sum: f64, max: f64, best: &mut (f64, f64)) {
        let d = dist(a[i], b[j]);
        let (sum, max) = (sum + d, max.max(d));
        if i + 1 == a.len() && j + 1 == b.len() {
            best.0 = best.0.min(sum);
            best.1 = best.1.min(max);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, sum, max, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, sum, max, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, sum, max, best);
        }
    }
    let mut best = (f64::INFINITY, f64::INFINITY);
    walk(a, b, 0, 0, 0.0, 0.0, &mut best);
    best
}

pub fn random_points<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Point> {
    let n = rng.random_range(1..=max_len);
    (0..n)
        .map(|_| Point::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
        .collect()
}

/// Strictly increasing knots with gaps in [0.05, 1.0) and values in [-5, 5).
pub fn random_knots<R: Rng>(rng: &mut R, count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = rng.random_range(-2.0..2.0);
    let mut xs = Vec::with_capacity(count);
    for _ in 0..count {
        xs.push(t);
        t += rng.random_range(0.05..1.0);
    }
    let ys = (0..count).map(|_| rng.random_range(-5.0..5.0)).collect();
    (xs, ys)
}

/// Random proper rigid motion: rotation from a unit quaternion plus translation.
pub fn rigid_motion<R: Rng>(rng: &mut R) -> impl Fn(Point) -> Point {
    let q = nalgebra::UnitQuaternion::from_euler_angles(
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    );
    let shift =
        nalgebra::Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    move |p: Point| {
        let v = q * nalgebra::Vector3::new(p.x, p.y, p.z) + shift;
        Point::new(v.x, v.y, v.z)
    }
}
