//! Demonstrated flight paths: validation, trimming and CSV/JSONL persistence.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar, Vec3};

/// A single tracked position with the time (seconds) it was recorded at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedPoint<T> {
    pub t: T,
    pub position: Vec3<T>,
}

impl<T: Scalar> TrackedPoint<T> {
    pub fn new(t: T, x: T, y: T, z: T) -> Self {
        Self { t, position: Vec3::new(x, y, z) }
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.position.is_finite()
    }
}

/// Recorded point sequence with non-destructive trim bounds.
///
/// Points outside `trim_start..=trim_end` are kept so the path can be
/// re-trimmed, but are ignored by everything downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightPath<T> {
    points: Vec<TrackedPoint<T>>,
    trim_start: usize,
    trim_end: usize,
}

impl<T: Scalar> FlightPath<T> {
    /// Validates the points and spans the trim bounds over all of them.
    pub fn new(points: Vec<TrackedPoint<T>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints { required: 2, found: points.len() });
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {index} has a non-finite field")));
        }
        check_increasing_times(&points)?;
        let trim_end = points.len() - 1;
        Ok(Self { points, trim_start: 0, trim_end })
    }

    pub fn points(&self) -> &[TrackedPoint<T>] {
        &self.points
    }

    pub fn trim_bounds(&self) -> (usize, usize) {
        (self.trim_start, self.trim_end)
    }

    /// Returns a copy marking `[start, end]` (inclusive, indices into all
    /// points) as the effective span.
    pub fn trim(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end >= self.points.len() {
            return Err(Error::InvalidTrimRange { start, end, len: self.points.len() });
        }
        Ok(Self { points: self.points.clone(), trim_start: start, trim_end: end })
    }

    pub fn effective_points(&self) -> &[TrackedPoint<T>] {
        &self.points[self.trim_start..=self.trim_end]
    }

    /// New untrimmed path holding only the effective points.
    pub fn to_trimmed(&self) -> Self {
        Self { points: self.effective_points().to_vec(), trim_start: 0, trim_end: self.trim_end - self.trim_start }
    }

    pub fn duration(&self) -> T {
        let pts = self.effective_points();
        pts[pts.len() - 1].t - pts[0].t
    }

    pub fn positions(&self) -> Vec<Vec3<T>> {
        self.effective_points().iter().map(|p| p.position).collect()
    }
}

pub(crate) fn check_increasing_times<T: Scalar>(points: &[TrackedPoint<T>]) -> Result<()> {
    match points.windows(2).position(|w| w[1].t <= w[0].t) {
        Some(i) => Err(Error::NonMonotoneTime { index: i + 1 }),
        None => Ok(()),
    }
}

/// On-disk encoding of point sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Header `t,x,y,z` followed by one record per line.
    Csv,
    /// One `{"t":..,"x":..,"y":..,"z":..}` object per line.
    Jsonl,
}

impl Format {
    /// Picks JSONL for `.jsonl`/`.ndjson` files and CSV otherwise.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Flat record shared by flight paths and waypoint sets. Extra JSONL keys
/// (orientation quaternions from pose logs, for instance) are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

impl PointRecord {
    pub fn to_point<T: Scalar>(self) -> TrackedPoint<T> {
        TrackedPoint::new(T::lit(self.t), T::lit(self.x), T::lit(self.y), T::lit(self.z))
    }

    pub fn from_point<T: Scalar>(p: &TrackedPoint<T>, index: Option<usize>) -> Self {
        Self {
            t: p.t.to_f64_lossy(),
            x: p.position.x.to_f64_lossy(),
            y: p.position.y.to_f64_lossy(),
            z: p.position.z.to_f64_lossy(),
            index,
        }
    }
}

const HEADER: [&str; 4] = ["t", "x", "y", "z"];

pub(crate) fn read_records<R: Read>(source: R, format: Format, allow_index: bool) -> Result<Vec<PointRecord>> {
    match format {
        Format::Csv => read_csv(source, allow_index),
        Format::Jsonl => read_jsonl(source),
    }
}

fn read_csv<R: Read>(source: R, allow_index: bool) -> Result<Vec<PointRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let header_ok = names == HEADER || (allow_index && names == ["t", "x", "y", "z", "index"]);
    if !header_ok {
        return Err(Error::MalformedRecord {
            line: 1,
            reason: format!("expected header `t,x,y,z`, found `{}`", names.join(",")),
        });
    }
    reader.deserialize().map(|r| r.map_err(csv_error)).collect()
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    let reason = match err.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => err.to_string(),
    };
    Error::MalformedRecord { line, reason }
}

fn read_jsonl<R: Read>(source: R) -> Result<Vec<PointRecord>> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| Error::MalformedRecord { line: i as u64 + 1, reason: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}

pub(crate) fn write_records<W: Write>(mut sink: W, format: Format, records: &[PointRecord]) -> Result<()> {
    let with_index = records.iter().any(|r| r.index.is_some());
    match format {
        Format::Csv => {
            if with_index {
                writeln!(sink, "t,x,y,z,index")?;
            } else {
                writeln!(sink, "t,x,y,z")?;
            }
            for r in records {
                // f64 Display is the shortest representation that parses back exactly.
                write!(sink, "{},{},{},{}", r.t, r.x, r.y, r.z)?;
                match (with_index, r.index) {
                    (true, Some(i)) => writeln!(sink, ",{i}")?,
                    (true, None) => writeln!(sink, ",")?,
                    _ => writeln!(sink)?,
                }
            }
        }
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut sink, r)?;
                writeln!(sink)?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

/// Decodes a flight path; the result is untrimmed.
pub fn load_flight_path<T: Scalar, R: Read>(source: R, format: Format) -> Result<FlightPath<T>> {
    let points = read_records(source, format, false)?.into_iter().map(PointRecord::to_point).collect();
    FlightPath::new(points)
}

/// Writes every recorded point (trim bounds are not part of the format).
pub fn save_flight_path<T: Scalar, W: Write>(path: &FlightPath<T>, format: Format, sink: W) -> Result<()> {
    let records: Vec<_> = path.points().iter().map(|p| PointRecord::from_point(p, None)).collect();
    write_records(sink, format, &records)
}
