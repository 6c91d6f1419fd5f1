//! Natural cubic splines and the decoupled per-axis trajectory built from them.

use serde::{Deserialize, Serialize};

use crate::sampling::WaypointSet;
use crate::{Error, Result, Scalar, Vec3};

/// Coefficients of `s(x) = a(x - x_i)^3 + b(x - x_i)^2 + c(x - x_i) + d` on
/// the segment starting at knot `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentCoeffs<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> SegmentCoeffs<T> {
    fn eval(&self, h: T, order: Order) -> T {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        match order {
            Order::Value => ((self.a * h + self.b) * h + self.c) * h + self.d,
            Order::First => (three * self.a * h + two * self.b) * h + self.c,
            Order::Second => T::lit(6.0) * self.a * h + two * self.b,
        }
    }
}

/// Derivative order for spline evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Value,
    First,
    Second,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Order::Value),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidArgument(format!("derivative order {v} not supported"))),
        }
    }
}

/// Piecewise cubic, twice continuously differentiable interpolant with zero
/// second derivative at both end knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline1D<T> {
    knots: Vec<T>,
    values: Vec<T>,
    segments: Vec<SegmentCoeffs<T>>,
}

impl<T: Scalar> CubicSpline1D<T> {
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        let (knots, values) = pairs.iter().copied().unzip();
        Self::natural(knots, values)
    }

    /// Interpolates `values` at strictly increasing `knots`.
    pub fn natural(knots: Vec<T>, values: Vec<T>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::InvalidArgument(format!("{} knots but {} values", knots.len(), values.len())));
        }
        if knots.len() < 2 {
            return Err(Error::TooFewPoints { required: 2, found: knots.len() });
        }
        if let Some(i) = knots.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneKnots { index: i + 1 });
        }
        if !knots.iter().chain(&values).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("spline input must be finite".into()));
        }

        let n = knots.len();
        let widths: Vec<T> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slopes: Vec<T> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / widths[i]).collect();
        let curvature = second_derivatives(&widths, &slopes);

        let six = T::lit(6.0);
        let segments = (0..n - 1)
            .map(|i| {
                let h = widths[i];
                let (m0, m1) = (curvature[i], curvature[i + 1]);
                SegmentCoeffs {
                    a: (m1 - m0) / (six * h),
                    b: m0 / T::lit(2.0),
                    c: slopes[i] - h * (T::lit(2.0) * m0 + m1) / six,
                    d: values[i],
                }
            })
            .collect();
        Ok(Self { knots, values, segments })
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn segments(&self) -> &[SegmentCoeffs<T>] {
        &self.segments
    }

    pub fn domain(&self) -> (T, T) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Segment whose half-open interval `[x_i, x_{i+1})` holds `x`; the last
    /// knot belongs to the final segment. `x` is clamped to the domain.
    pub fn segment_index(&self, x: T) -> usize {
        let upper = self.knots.partition_point(|&k| k <= x);
        upper.saturating_sub(1).min(self.segments.len() - 1)
    }

    /// Evaluates segment `i`'s polynomial at `x` without a domain check.
    pub fn eval_segment(&self, i: usize, x: T, order: Order) -> T {
        self.segments[i].eval(x - self.knots[i], order)
    }

    pub fn eval(&self, x: T, order: Order) -> Result<T> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x: x.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        Ok(self.eval_segment(self.segment_index(x), x, order))
    }
}

/// Solves the symmetric tridiagonal system for the knot second derivatives
/// with natural boundary (both end values zero).
fn second_derivatives<T: Scalar>(widths: &[T], slopes: &[T]) -> Vec<T> {
    let n = widths.len() + 1;
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    let interior = n - 2;
    let two = T::lit(2.0);
    let six = T::lit(6.0);

    // Thomas algorithm; the system is strictly diagonally dominant.
    let mut upper = vec![T::zero(); interior];
    let mut rhs = vec![T::zero(); interior];
    for k in 0..interior {
        let i = k + 1;
        let sub = widths[i - 1];
        let diag = two * (widths[i - 1] + widths[i]);
        let sup = widths[i];
        let r = six * (slopes[i] - slopes[i - 1]);
        if k == 0 {
            upper[k] = sup / diag;
            rhs[k] = r / diag;
        } else {
            let denom = diag - sub * upper[k - 1];
            upper[k] = sup / denom;
            rhs[k] = (r - sub * rhs[k - 1]) / denom;
        }
    }
    m[interior] = rhs[interior - 1];
    for k in (0..interior - 1).rev() {
        m[k + 1] = rhs[k] - upper[k] * m[k + 2];
    }
    m
}

/// Time-parameterized 3D curve `T(t) = [S_x(t), S_y(t), S_z(t)]` with one
/// natural spline per axis over a shared knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    axes: [CubicSpline1D<T>; 3],
}

/// Position, velocity and acceleration of a trajectory at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint<T> {
    pub t: T,
    #[serde(rename = "p")]
    pub position: Vec3<T>,
    #[serde(rename = "v")]
    pub velocity: Vec3<T>,
    #[serde(rename = "a")]
    pub acceleration: Vec3<T>,
}

impl<T: Scalar> Trajectory<T> {
    /// Interpolates x, y and z separately against the waypoint timestamps.
    pub fn plan(waypoints: &WaypointSet<T>) -> Result<Self> {
        let pts = waypoints.waypoints();
        let knots: Vec<T> = pts.iter().map(|p| p.t).collect();
        let axis = |f: fn(&Vec3<T>) -> T| -> Result<CubicSpline1D<T>> {
            CubicSpline1D::natural(knots.clone(), pts.iter().map(|p| f(&p.position)).collect())
        };
        Ok(Self { axes: [axis(|p| p.x)?, axis(|p| p.y)?, axis(|p| p.z)?] })
    }

    pub fn x(&self) -> &CubicSpline1D<T> {
        &self.axes[0]
    }

    pub fn y(&self) -> &CubicSpline1D<T> {
        &self.axes[1]
    }

    pub fn z(&self) -> &CubicSpline1D<T> {
        &self.axes[2]
    }

    pub fn knots(&self) -> &[T] {
        self.axes[0].knots()
    }

    pub fn t0(&self) -> T {
        self.axes[0].domain().0
    }

    pub fn tmax(&self) -> T {
        self.axes[0].domain().1
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.t0() && t <= self.tmax()
    }

    pub fn eval(&self, t: T, order: Order) -> Result<Vec3<T>> {
        let [x, y, z] = &self.axes;
        Ok(Vec3::new(x.eval(t, order)?, y.eval(t, order)?, z.eval(t, order)?))
    }

    pub fn position(&self, t: T) -> Result<Vec3<T>> {
        self.eval(t, Order::Value)
    }

    pub fn velocity(&self, t: T) -> Result<Vec3<T>> {
        self.eval(t, Order::First)
    }

    pub fn acceleration(&self, t: T) -> Result<Vec3<T>> {
        self.eval(t, Order::Second)
    }

    pub fn control_point(&self, t: T) -> Result<ControlPoint<T>> {
        Ok(ControlPoint {
            t,
            position: self.position(t)?,
            velocity: self.velocity(t)?,
            acceleration: self.acceleration(t)?,
        })
    }

    /// Control points on the grid from [`sample_times`].
    pub fn sample(&self, step: T) -> Result<Vec<ControlPoint<T>>> {
        sample_times(self.t0(), self.tmax(), step)?.into_iter().map(|t| self.control_point(t)).collect()
    }
}

pub fn plan_trajectory<T: Scalar>(waypoints: &WaypointSet<T>) -> Result<Trajectory<T>> {
    Trajectory::plan(waypoints)
}

/// `t0, t0 + step, t0 + 2 step, ...` strictly below `tmax`, then `tmax`.
///
/// Grid points closer to `tmax` than a billionth of a step are dropped so
/// the final sample is never duplicated by rounding.
pub fn sample_times<T: Scalar>(t0: T, tmax: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::NonPositiveStep(step.to_f64_lossy()));
    }
    let cutoff = tmax - step * T::lit(1e-9);
    let mut times = Vec::new();
    let mut k = 0usize;
    loop {
        let t = t0 + T::from_usize_lossy(k) * step;
        if t >= cutoff {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(tmax);
    Ok(times)
}
