//! Similarity between two point sequences of possibly different lengths.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport<T> {
    pub hausdorff: T,
    pub frechet: T,
    /// Accumulated distance along the optimal warping path.
    pub dtw: T,
    /// `dtw` divided by the larger point count.
    pub dtw_normalized: T,
}

impl<T: Scalar> SimilarityReport<T> {
    pub fn compute(a: &[Vec3<T>], b: &[Vec3<T>]) -> Result<Self> {
        let dtw = dtw_distance(a, b)?;
        Ok(Self {
            hausdorff: hausdorff_distance(a, b)?,
            frechet: frechet_distance(a, b)?,
            dtw: dtw.dtw,
            dtw_normalized: dtw.normalized,
        })
    }
}

fn non_empty<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        Err(Error::EmptySequence)
    } else {
        Ok(())
    }
}

fn directed_hausdorff<T: Scalar>(from: &[Vec3<T>], to: &[Vec3<T>]) -> T {
    from.iter().map(|p| to.iter().map(|q| p.distance(*q)).fold(T::infinity(), T::min)).fold(T::zero(), T::max)
}

/// Symmetric discrete Hausdorff distance.
pub fn hausdorff_distance<T: Scalar>(a: &[Vec3<T>], b: &[Vec3<T>]) -> Result<T> {
    non_empty(a, b)?;
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Discrete Fréchet distance (Eiter & Mannila recurrence), two rows of memory.
pub fn frechet_distance<T: Scalar>(a: &[Vec3<T>], b: &[Vec3<T>]) -> Result<T> {
    non_empty(a, b)?;
    let mut prev = vec![T::zero(); b.len()];
    let mut row = vec![T::zero(); b.len()];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let d = p.distance(*q);
            row[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => d.max(row[j - 1]),
                (_, 0) => d.max(prev[0]),
                _ => d.max(prev[j].min(row[j - 1]).min(prev[j - 1])),
            };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    Ok(prev[b.len() - 1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dtw<T> {
    pub dtw: T,
    pub normalized: T,
}

/// Dynamic time warping with Euclidean point cost and the symmetric step set
/// `(i-1, j)`, `(i, j-1)`, `(i-1, j-1)`.
pub fn dtw_distance<T: Scalar>(a: &[Vec3<T>], b: &[Vec3<T>]) -> Result<Dtw<T>> {
    non_empty(a, b)?;
    let mut prev = vec![T::zero(); b.len()];
    let mut row = vec![T::zero(); b.len()];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            let best = match (i, j) {
                (0, 0) => T::zero(),
                (0, _) => row[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(row[j - 1]).min(prev[j - 1]),
            };
            row[j] = best + p.distance(*q);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    let dtw = prev[b.len() - 1];
    let longest = T::from_usize_lossy(a.len().max(b.len()));
    Ok(Dtw { dtw, normalized: dtw / longest })
}
