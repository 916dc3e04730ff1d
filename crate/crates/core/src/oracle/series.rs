//! Propagators rebuilt from scaled Taylor series, sharing no code with the
//! spectral route in `statespace`.

use nalgebra::DMatrix;

use crate::contour::Branch;
use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::statespace::{UnitaryMatrix, C64};

/// exp(−i·s·H) by scaling and squaring of the Taylor series.
pub fn expm_series(h: &DMatrix<C64>, s: f64) -> DMatrix<C64> {
    let n = h.nrows();
    let a = h.map(|x| x * C64::new(0.0, -s));
    let norm = a.norm();
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a.unscale(2f64.powi(squarings));
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &b).unscale(k as f64);
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Walks a schedule from `t_from` to `t_to`, multiplying in one factor per
/// traversed stretch; factors met later in the walk act later (go left).
pub struct SeriesPropagator<'a> {
    sched: &'a HamiltonianSchedule,
    branch: Branch,
}

impl<'a> SeriesPropagator<'a> {
    pub fn new(sched: &'a HamiltonianSchedule, branch: Branch) -> Self {
        Self { sched, branch }
    }

    pub fn propagate(&self, t_from: f64, t_to: f64) -> Result<DMatrix<C64>> {
        let (start, end) = self.sched.coverage();
        for t in [t_from, t_to] {
            if !(t >= start && t <= end) {
                return Err(Error::OutsideCoverage { t, start, end });
            }
        }
        let n = self.sched.dim();
        let mut u = DMatrix::<C64>::identity(n, n);
        for (entry, exit, h) in stretches(self.sched, self.branch, t_from, t_to) {
            u = expm_series(h, exit - entry) * u;
        }
        Ok(u)
    }

    pub fn propagate_unitary(&self, t_from: f64, t_to: f64) -> Result<UnitaryMatrix> {
        self.propagate(t_from, t_to).map(UnitaryMatrix::from_matrix_unchecked)
    }
}

/// Constant-`H` stretches met when walking from `t_from` to `t_to`, in walk
/// order, as `(entry, exit, H)`.
pub(crate) fn stretches(
    sched: &HamiltonianSchedule,
    branch: Branch,
    t_from: f64,
    t_to: f64,
) -> Vec<(f64, f64, &DMatrix<C64>)> {
    let (lo, hi) = (t_from.min(t_to), t_from.max(t_to));
    let mut out: Vec<(f64, f64, &DMatrix<C64>)> = sched
        .pieces_for(branch)
        .iter()
        .filter_map(|p| {
            let a = p.t_start.max(lo);
            let b = p.t_end.min(hi);
            (b > a).then_some((a, b, p.h.matrix()))
        })
        .collect();
    if t_to < t_from {
        out.reverse();
        for s in &mut out {
            std::mem::swap(&mut s.0, &mut s.1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Piece;
    use crate::statespace::HermitianOperator;

    #[test]
    fn series_matches_pauli_closed_form() {
        let x = HermitianOperator::pauli_x();
        for s in [0.0f64, 0.1, 1.0, 7.5, -3.2] {
            let closed = DMatrix::<C64>::identity(2, 2).scale(s.cos())
                - x.matrix().map(|v| v * C64::new(0.0, s.sin()));
            assert!((expm_series(x.matrix(), s) - closed).norm() < 1e-13, "s = {s}");
        }
    }

    #[test]
    fn walk_order_backward() {
        let sched = HamiltonianSchedule::new(vec![
            Piece::new(0.0, 1.0, HermitianOperator::pauli_x()),
            Piece::new(1.0, 2.0, HermitianOperator::pauli_z()),
        ])
        .unwrap();
        let walk = stretches(&sched, Branch::Backward, 1.5, 0.5);
        assert_eq!(walk.len(), 2);
        assert_eq!((walk[0].0, walk[0].1), (1.5, 1.0));
        assert_eq!((walk[1].0, walk[1].1), (1.0, 0.5));
        let p = SeriesPropagator::new(&sched, Branch::Forward);
        let there = p.propagate(0.5, 1.5).unwrap();
        let back = p.propagate(1.5, 0.5).unwrap();
        assert!((back * there - DMatrix::<C64>::identity(2, 2)).norm() < 1e-13);
        assert!(p.propagate(0.5, 2.5).is_err());
    }
}
