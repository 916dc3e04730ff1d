//! Fixed-step fourth-order Runge–Kutta integration of the branch
//! Schrödinger equation along the contour path of a history.

use nalgebra::DVector;

use crate::contour::{build_path, Branch};
use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::histories::QuantumHistory;
use crate::oracle::series::stretches;
use crate::statespace::C64;

/// Order of the underlying scheme; used by the Richardson estimate.
pub const RK4_ORDER: i32 = 4;

/// Integrates `i dv/dt = H v` from `t_from` to `t_to` (either direction) with
/// `steps` RK4 steps on every constant-`H` stretch crossed.
pub fn evolve_rk4(
    sched: &HamiltonianSchedule,
    branch: Branch,
    t_from: f64,
    t_to: f64,
    steps: usize,
    v: &DVector<C64>,
) -> DVector<C64> {
    let mut v = v.clone();
    for (entry, exit, h) in stretches(sched, branch, t_from, t_to) {
        let dt = (exit - entry) / steps as f64;
        let rhs = |x: &DVector<C64>| -> DVector<C64> { (h * x).map(|c| c * C64::new(0.0, -1.0)) };
        for _ in 0..steps {
            v = rk4_step(&rhs, &v, dt);
        }
    }
    v
}

fn rk4_step(f: &impl Fn(&DVector<C64>) -> DVector<C64>, v: &DVector<C64>, dt: f64) -> DVector<C64> {
    let k1 = f(v);
    let k2 = f(&(v + k1.scale(dt / 2.0)));
    let k3 = f(&(v + k2.scale(dt / 2.0)));
    let k4 = f(&(v + k3.scale(dt)));
    v + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    /// Richardson-extrapolated ΔΨ (real part).
    pub value: f64,
    /// Imaginary part of the extrapolated ΔΨ.
    pub imag: f64,
    /// Estimated error of `fine`, a conservative bound on the error of `value`.
    pub err_estimate: f64,
    /// ΔΨ with `steps` steps per stretch.
    pub fine: C64,
    /// ΔΨ with half as many steps.
    pub coarse: C64,
    pub steps: usize,
}

/// ΔΨ of `history` evaluated as a contour line integral.
///
/// Each path segment advances one temporal part from its fixed point at the
/// lower limit to the next fixed-point time; the integrated wavefunction is
/// then projected on the sink state at the upper limits. The overlap of the
/// sink with the un-propagated stack vanishes exactly because every moved
/// part changes its time label, so only the propagated term contributes.
pub fn contour_line_integral(
    sched: &HamiltonianSchedule,
    history: &QuantumHistory,
    steps_per_segment: usize,
) -> Result<LineIntegral> {
    if steps_per_segment < 2 {
        return Err(Error::InvalidArgument("steps_per_segment must be at least 2".into()));
    }
    if history.dim() != sched.dim() {
        return Err(Error::DimensionMismatch { expected: sched.dim(), found: history.dim() });
    }
    for t in history.times() {
        sched.require_covered(t)?;
    }
    let coarse_steps = steps_per_segment / 2;
    let fine = projected_change(sched, history, steps_per_segment)?;
    let coarse = projected_change(sched, history, coarse_steps)?;
    let ratio = steps_per_segment as f64 / coarse_steps as f64;
    let denom = ratio.powi(RK4_ORDER) - 1.0;
    let correction = (fine - coarse).unscale(denom);
    let value = fine + correction;

    let stretch_count: usize = build_path(&history.times(), history.len())?
        .segments()
        .iter()
        .map(|s| stretches(sched, s.branch, s.from, s.to).len().max(1))
        .sum();
    let rounding = (stretch_count * steps_per_segment) as f64 * f64::EPSILON * value.norm().max(1.0);
    Ok(LineIntegral {
        value: value.re,
        imag: value.im,
        err_estimate: correction.norm() + rounding,
        fine,
        coarse,
        steps: steps_per_segment,
    })
}

fn projected_change(sched: &HamiltonianSchedule, history: &QuantumHistory, steps: usize) -> Result<C64> {
    let times = history.times();
    let path = build_path(&times, times.len())?;
    let index_of = |t: f64| times.iter().position(|&x| x == t).expect("path time is a fixed point");
    let mut product = C64::new(1.0, 0.0);
    for seg in path.segments() {
        let source = &history.points()[index_of(seg.from)].state;
        let sink = &history.points()[index_of(seg.to)].state;
        let moved = evolve_rk4(sched, seg.branch, seg.from, seg.to, steps, source.as_dvector());
        product *= sink.as_dvector().dotc(&moved);
    }
    Ok(product)
}

/// Observed convergence order from errors at step counts `n` and `2n`.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).log2()
}
