//! Waypoint selection from a trimmed demonstration.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::recording::{self, check_increasing_times, Format, PointRecord, TrackedPoint};
use crate::{Error, Result, Scalar, Vec3};

/// Generator behind [`sample_random`]; stored next to results so a run can be
/// reproduced with the same algorithm.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    Equidistant,
    Random,
}

impl std::str::FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equidistant" => Ok(Self::Equidistant),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidArgument(format!("unknown sampling strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub strategy: SamplingStrategy,
    /// Requested waypoint count.
    pub n: usize,
    /// Only used by the random strategy.
    #[serde(default)]
    pub seed: u64,
}

impl SamplingConfig {
    pub fn equidistant(n: usize) -> Self {
        Self { strategy: SamplingStrategy::Equidistant, n, seed: 0 }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        Self { strategy: SamplingStrategy::Random, n, seed }
    }

    pub fn sample<T: Scalar>(&self, points: &[TrackedPoint<T>]) -> Result<WaypointSet<T>> {
        match self.strategy {
            SamplingStrategy::Equidistant => sample_equidistant(points, self.n),
            SamplingStrategy::Random => sample_random(points, self.n, self.seed),
        }
    }
}

/// Waypoints the trajectory has to pass through, ordered by time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointSet<T> {
    waypoints: Vec<TrackedPoint<T>>,
    source_indices: Option<Vec<usize>>,
}

impl<T: Scalar> WaypointSet<T> {
    /// Builds a synthetic or edited set with no link to a recording.
    pub fn new(waypoints: Vec<TrackedPoint<T>>) -> Result<Self> {
        Self::validate(&waypoints)?;
        Ok(Self { waypoints, source_indices: None })
    }

    fn from_indices(points: &[TrackedPoint<T>], indices: Vec<usize>) -> Self {
        let waypoints = indices.iter().map(|&i| points[i]).collect();
        Self { waypoints, source_indices: Some(indices) }
    }

    fn validate(waypoints: &[TrackedPoint<T>]) -> Result<()> {
        if waypoints.len() < 2 {
            return Err(Error::TooFewWaypoints(waypoints.len()));
        }
        check_increasing_times(waypoints)
    }

    pub fn waypoints(&self) -> &[TrackedPoint<T>] {
        &self.waypoints
    }

    /// Indices into the trimmed sequence the waypoints were drawn from;
    /// `None` once the set has been edited.
    pub fn source_indices(&self) -> Option<&[usize]> {
        self.source_indices.as_deref()
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3<T>> {
        self.waypoints.iter().map(|w| w.position).collect()
    }

    pub fn first(&self) -> &TrackedPoint<T> {
        &self.waypoints[0]
    }

    /// Replaces positions while keeping timestamps; drops the source link.
    pub(crate) fn with_positions(&self, positions: impl IntoIterator<Item = Vec3<T>>) -> Self {
        let waypoints =
            self.waypoints.iter().zip(positions).map(|(w, position)| TrackedPoint { t: w.t, position }).collect();
        Self { waypoints, source_indices: None }
    }
}

fn check_count(available: usize, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewWaypoints(n));
    }
    if n > available {
        return Err(Error::TooManyWaypoints { requested: n, available });
    }
    Ok(())
}

/// Indices picked by equidistant selection over a sequence of `len` points.
///
/// `d = round((len - n) / (n - 1))` points are skipped between consecutive
/// picks, starting at index 0, and the last index is always appended. The
/// result may hold more or fewer than `n` indices; for `len = 10, n = 5` it
/// is `[0, 2, 4, 6, 8, 9]`.
pub fn equidistant_indices(len: usize, n: usize) -> Result<Vec<usize>> {
    check_count(len, n)?;
    // f64::round rounds half away from zero
    let skip = ((len - n) as f64 / (n - 1) as f64).round() as usize;
    let mut indices: Vec<usize> = (0..len - 1).step_by(skip + 1).collect();
    indices.push(len - 1);
    Ok(indices)
}

pub fn sample_equidistant<T: Scalar>(points: &[TrackedPoint<T>], n: usize) -> Result<WaypointSet<T>> {
    let indices = equidistant_indices(points.len(), n)?;
    Ok(WaypointSet::from_indices(points, indices))
}

/// First and last point plus `n - 2` distinct interior points drawn
/// uniformly without replacement, returned in time order.
pub fn sample_random<T: Scalar>(points: &[TrackedPoint<T>], n: usize, seed: u64) -> Result<WaypointSet<T>> {
    check_count(points.len(), n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior = points.len() - 2;
    let mut indices: Vec<usize> =
        rand::seq::index::sample(&mut rng, interior, n - 2).into_iter().map(|i| i + 1).collect();
    indices.sort_unstable();
    indices.insert(0, 0);
    indices.push(points.len() - 1);
    Ok(WaypointSet::from_indices(points, indices))
}

/// Decodes a waypoint set. CSV input may carry an extra `index` column.
pub fn load_waypoints<T: Scalar, R: Read>(source: R, format: Format) -> Result<WaypointSet<T>> {
    let records = recording::read_records(source, format, true)?;
    let indices: Option<Vec<usize>> = records.iter().map(|r| r.index).collect();
    let points: Vec<TrackedPoint<T>> = records.into_iter().map(PointRecord::to_point).collect();
    WaypointSet::validate(&points)?;
    let source_indices = indices.filter(|ix| ix.windows(2).all(|w| w[0] < w[1]));
    Ok(WaypointSet { waypoints: points, source_indices })
}

pub fn save_waypoints<T: Scalar, W: Write>(set: &WaypointSet<T>, format: Format, sink: W) -> Result<()> {
    let records: Vec<_> = set
        .waypoints
        .iter()
        .enumerate()
        .map(|(k, p)| PointRecord::from_point(p, set.source_indices.as_ref().map(|ix| ix[k])))
        .collect();
    recording::write_records(sink, format, &records)
}
