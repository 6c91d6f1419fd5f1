//! Interpolation error between a demonstration and the trajectory planned from it.

use serde::{Deserialize, Serialize};

use crate::recording::TrackedPoint;
use crate::spline::Trajectory;
use crate::{Error, Result, Scalar, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry<T> {
    pub t: T,
    /// Recorded position minus trajectory position.
    pub e: Vec3<T>,
    pub norm: T,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorSeries<T> {
    pub entries: Vec<ErrorEntry<T>>,
}

impl<T: Scalar> ErrorSeries<T> {
    /// Builds a series from raw error vectors.
    pub fn from_vectors(items: impl IntoIterator<Item = (T, Vec3<T>)>) -> Self {
        let entries = items.into_iter().map(|(t, e)| ErrorEntry { t, e, norm: e.norm() }).collect();
        Self { entries }
    }

    pub fn norms(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().map(|e| e.norm)
    }
}

/// Aggregate interpolation error. `rsme` is the root of the mean squared
/// error norm (conventionally written RMSE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport<T> {
    pub rsme: T,
    pub mae: T,
    pub series: ErrorSeries<T>,
    /// Each norm divided by the largest one; all zero when every norm is zero.
    pub normalized: Vec<T>,
}

/// `e_i = p_i - T(t_i)` for every recorded point.
pub fn position_error_series<T: Scalar>(
    demonstration: &[TrackedPoint<T>],
    trajectory: &Trajectory<T>,
) -> Result<ErrorSeries<T>> {
    let mut items = Vec::with_capacity(demonstration.len());
    for p in demonstration {
        if !trajectory.contains(p.t) {
            return Err(Error::TimestampOutsideDomain {
                t: p.t.to_f64_lossy(),
                lo: trajectory.t0().to_f64_lossy(),
                hi: trajectory.tmax().to_f64_lossy(),
            });
        }
        items.push((p.t, p.position - trajectory.position(p.t)?));
    }
    Ok(ErrorSeries::from_vectors(items))
}

pub fn aggregate_errors<T: Scalar>(series: ErrorSeries<T>) -> Result<ErrorReport<T>> {
    if series.entries.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = T::from_usize_lossy(series.entries.len());
    let mae = series.norms().sum::<T>() / n;
    let rsme = (series.norms().map(|v| v * v).sum::<T>() / n).sqrt();
    let max = series.norms().fold(T::zero(), T::max);
    let normalized = series.norms().map(|v| if max > T::zero() { v / max } else { T::zero() }).collect();
    Ok(ErrorReport { rsme, mae, series, normalized })
}

/// Green `(0,255,0)` for no deviation through red `(255,0,0)` for the
/// largest one, per recorded timestamp. Channels round half up.
pub fn color_scale<T: Scalar>(report: &ErrorReport<T>) -> Vec<(T, [u8; 3])> {
    report
        .series
        .entries
        .iter()
        .zip(&report.normalized)
        .map(|(entry, &v)| (entry.t, gradient_rgb(v.to_f64_lossy())))
        .collect()
}

pub fn gradient_rgb(normalized: f64) -> [u8; 3] {
    let v = normalized.clamp(0.0, 1.0);
    let channel = |x: f64| (x * 255.0 + 0.5).floor() as u8;
    [channel(v), channel(1.0 - v), 0]
}
