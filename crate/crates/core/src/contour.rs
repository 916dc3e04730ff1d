//! Keldysh contour times and integration paths between fixed points.
//!
//! The contour runs forward in real time on the `f` branch and then back on
//! the `b` branch, so every forward time precedes every backward time.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Forward,
    Backward,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Forward, Branch::Backward];

    pub fn label(self) -> &'static str {
        match self {
            Branch::Forward => "f",
            Branch::Backward => "b",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A point on the contour. `t^f` and `t^b` at the same real time are distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourTime {
    pub t: f64,
    pub branch: Branch,
}

impl ContourTime {
    pub fn new(t: f64, branch: Branch) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFinite("contour time"));
        }
        Ok(Self { t, branch })
    }

    pub fn forward(t: f64) -> Self {
        Self { t, branch: Branch::Forward }
    }

    pub fn backward(t: f64) -> Self {
        Self { t, branch: Branch::Backward }
    }
}

impl PartialOrd for ContourTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(contour_compare(self, other))
    }
}

/// Contour ordering: ascending real time on `f`, descending on `b`, and the
/// whole `f` branch before the `b` branch.
pub fn contour_compare(a: &ContourTime, b: &ContourTime) -> Ordering {
    match (a.branch, b.branch) {
        (Branch::Forward, Branch::Forward) => a.t.total_cmp(&b.t),
        (Branch::Backward, Branch::Backward) => b.t.total_cmp(&a.t),
        (Branch::Forward, Branch::Backward) => Ordering::Less,
        (Branch::Backward, Branch::Forward) => Ordering::Greater,
    }
}

/// One oriented stretch of a branch. Forward segments run `from < to`,
/// backward segments `from > to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub branch: Branch,
    pub from: f64,
    pub to: f64,
}

impl Segment {
    pub fn start(&self) -> ContourTime {
        ContourTime { t: self.from, branch: self.branch }
    }

    pub fn end(&self) -> ContourTime {
        ContourTime { t: self.to, branch: self.branch }
    }

    /// The covered real interval as `(low, high)`.
    pub fn interval(&self) -> (f64, f64) {
        (self.from.min(self.to), self.from.max(self.to))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    segments: Vec<Segment>,
}

impl ContourPath {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// The path visiting every interval between consecutive fixed-point times
/// once per branch: all forward segments in ascending order, then all
/// backward segments in descending order.
pub fn build_path(times: &[f64], n_points: usize) -> Result<ContourPath> {
    if times.len() < 2 || n_points < 2 {
        return Err(Error::TooFewPoints(times.len().min(n_points)));
    }
    if times.len() != n_points {
        return Err(Error::InvalidArgument(format!(
            "{} times given for {} points",
            times.len(),
            n_points
        )));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("path time"));
    }
    if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::NonMonotoneTimes { index: i + 1 });
    }
    let forward = times.windows(2).map(|w| Segment {
        branch: Branch::Forward,
        from: w[0],
        to: w[1],
    });
    let backward = times.windows(2).rev().map(|w| Segment {
        branch: Branch::Backward,
        from: w[1],
        to: w[0],
    });
    Ok(ContourPath { segments: forward.chain(backward).collect() })
}
