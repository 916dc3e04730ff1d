//! Branch propagators from piecewise-constant Hamiltonian schedules.
//!
//! Within one piece `H` is constant and the exponential is exact; across
//! pieces the time-ordered exponential becomes a finite ordered product.

use crate::contour::Branch;
use crate::error::{Error, Result};
use crate::statespace::{expm_hermitian, HermitianOperator, StateVector, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub t_start: f64,
    pub t_end: f64,
    pub h: HermitianOperator,
}

impl Piece {
    pub fn new(t_start: f64, t_end: f64, h: HermitianOperator) -> Self {
        Self { t_start, t_end, h }
    }
}

/// Piecewise-constant `H(t)` on a contiguous interval. Without an override
/// both branches share the same pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSchedule {
    dim: usize,
    pieces: Vec<Piece>,
    branch_override: Option<Vec<Piece>>,
}

fn validate_pieces(pieces: &[Piece]) -> Result<usize> {
    let first = pieces.first().ok_or(Error::Empty("schedule pieces"))?;
    let dim = first.h.dim();
    for (i, p) in pieces.iter().enumerate() {
        if !p.t_start.is_finite() || !p.t_end.is_finite() {
            return Err(Error::NonFinite("schedule time"));
        }
        if p.t_start >= p.t_end {
            return Err(Error::ScheduleGap { index: i });
        }
        if p.h.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.h.dim() });
        }
        if i > 0 && pieces[i - 1].t_end != p.t_start {
            return Err(Error::ScheduleGap { index: i });
        }
    }
    Ok(dim)
}

impl HamiltonianSchedule {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let dim = validate_pieces(&pieces)?;
        Ok(Self { dim, pieces, branch_override: None })
    }

    pub fn constant(h: HermitianOperator, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(vec![Piece::new(t_start, t_end, h)])
    }

    /// Zero Hamiltonian on `[t_start, t_end]`.
    pub fn zero(dim: usize, t_start: f64, t_end: f64) -> Result<Self> {
        Self::constant(HermitianOperator::zeros(dim), t_start, t_end)
    }

    /// Installs separate pieces for the backward branch. They must cover the
    /// same interval as the forward pieces.
    pub fn with_branch_override(mut self, pieces: Vec<Piece>) -> Result<Self> {
        let dim = validate_pieces(&pieces)?;
        if dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: dim });
        }
        let (s, e) = self.coverage();
        if pieces[0].t_start != s || pieces[pieces.len() - 1].t_end != e {
            return Err(Error::InvalidArgument(
                "backward-branch pieces must cover the forward coverage".into(),
            ));
        }
        self.branch_override = Some(pieces);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn branch_override(&self) -> Option<&[Piece]> {
        self.branch_override.as_deref()
    }

    pub fn pieces_for(&self, branch: Branch) -> &[Piece] {
        match (branch, &self.branch_override) {
            (Branch::Backward, Some(b)) => b,
            _ => &self.pieces,
        }
    }

    pub fn is_branch_independent(&self) -> bool {
        self.branch_override.is_none()
    }

    pub fn coverage(&self) -> (f64, f64) {
        (self.pieces[0].t_start, self.pieces[self.pieces.len() - 1].t_end)
    }

    pub fn covers(&self, t: f64) -> bool {
        let (s, e) = self.coverage();
        t >= s && t <= e
    }

    pub fn require_covered(&self, t: f64) -> Result<()> {
        if self.covers(t) {
            Ok(())
        } else {
            let (start, end) = self.coverage();
            Err(Error::OutsideCoverage { t, start, end })
        }
    }

    /// Splits the forward piece `index` at `at` into two pieces carrying the
    /// same generator.
    pub fn split_piece(&self, index: usize, at: f64) -> Result<Self> {
        let p = self
            .pieces
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("no piece {index}")))?;
        if !(at > p.t_start && at < p.t_end) {
            return Err(Error::InvalidArgument(format!("split time {at} not inside piece {index}")));
        }
        let mut pieces = self.pieces.clone();
        let right = Piece::new(at, p.t_end, p.h.clone());
        pieces[index].t_end = at;
        pieces.insert(index + 1, right);
        Ok(Self { pieces, ..self.clone() })
    }
}

/// `U^α(t_to, t_from)`: chronological product (latest factor leftmost) when
/// `t_to ≥ t_from`, anti-chronological product otherwise.
pub fn propagate(
    sched: &HamiltonianSchedule,
    branch: Branch,
    t_from: f64,
    t_to: f64,
) -> Result<UnitaryMatrix> {
    sched.require_covered(t_from)?;
    sched.require_covered(t_to)?;
    let forward = t_to >= t_from;
    let (lo, hi) = if forward { (t_from, t_to) } else { (t_to, t_from) };
    let mut u = UnitaryMatrix::identity(sched.dim());
    for piece in sched.pieces_for(branch) {
        let len = piece.t_end.min(hi) - piece.t_start.max(lo);
        if len <= 0.0 {
            continue;
        }
        u = if forward {
            expm_hermitian(&piece.h, len).then_after(&u)
        } else {
            u.then_after(&expm_hermitian(&piece.h, -len))
        };
    }
    Ok(u)
}

pub fn apply(u: &UnitaryMatrix, v: &StateVector) -> Result<StateVector> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(StateVector::from_dvector(u.matrix() * v.as_dvector()))
}

/// ‖U(t3,t1) − U(t3,t2)·U(t2,t1)‖_F.
pub fn compose_check(
    sched: &HamiltonianSchedule,
    branch: Branch,
    t1: f64,
    t2: f64,
    t3: f64,
) -> Result<f64> {
    if !(t1 <= t2 && t2 <= t3) {
        return Err(Error::TimeOrder("t1 <= t2 <= t3"));
    }
    let direct = propagate(sched, branch, t1, t3)?;
    let split = propagate(sched, branch, t2, t3)?.then_after(&propagate(sched, branch, t1, t2)?);
    Ok(direct.distance(&split))
}
