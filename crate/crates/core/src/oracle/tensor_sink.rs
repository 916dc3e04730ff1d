//! Brute-force ΔΨ from the explicit stack tensor.
//!
//! Every temporal part lives in `C^dim ⊗ C^{N_t}`, the second factor a
//! one-hot time label. Propagating a part from `t_a` to `t_b` applies
//! `U(t_b, t_a) ⊗ swap(a, b)` to its factor, so parts at different times are
//! orthogonal by construction.

use nalgebra::{DMatrix, DVector};

use crate::contour::{build_path, Branch};
use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::histories::{stack_state, QuantumHistory};
use crate::oracle::series::SeriesPropagator;
use crate::statespace::C64;

pub const MAX_POINTS: usize = 3;
pub const MAX_DIM: usize = 2;

fn labelled(state: &DVector<C64>, label: usize, n_labels: usize) -> DVector<C64> {
    let mut tag = DVector::zeros(n_labels);
    tag[label] = C64::new(1.0, 0.0);
    state.kronecker(&tag)
}

fn label_swap(a: usize, b: usize, n: usize) -> DMatrix<C64> {
    let mut p = DMatrix::<C64>::identity(n, n);
    p.swap_rows(a, b);
    p
}

/// Applies `op` to factor `slot` of a tensor with `slots` factors of size `d`.
fn apply_to_slot(psi: &[C64], op: &DMatrix<C64>, slot: usize, slots: usize, d: usize) -> Vec<C64> {
    let inner = d.pow((slots - 1 - slot) as u32);
    let outer = d.pow(slot as u32);
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for o in 0..outer {
        for i in 0..inner {
            for r in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..d {
                    acc += op[(r, c)] * psi[(o * d + c) * inner + i];
                }
                out[(o * d + r) * inner + i] = acc;
            }
        }
    }
    out
}

fn full_tensor(parts: &[DVector<C64>]) -> Vec<C64> {
    let mut v = parts[0].clone();
    for p in &parts[1..] {
        v = v.kronecker(p);
    }
    v.as_slice().to_vec()
}

fn overlap(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// ΔΨ = ⟨sink| (U_C − I) |Ψ⟩ for the full stack; only for `N_t ≤ 3`, `dim ≤ 2`.
pub fn tensor_sink_delta_psi(sched: &HamiltonianSchedule, history: &QuantumHistory) -> Result<f64> {
    let n = history.len();
    let dim = history.dim();
    if n > MAX_POINTS || dim > MAX_DIM {
        return Err(Error::TooLarge(format!("N_t = {n}, dim = {dim}")));
    }
    if dim != sched.dim() {
        return Err(Error::DimensionMismatch { expected: sched.dim(), found: dim });
    }
    let stack = stack_state(history);
    let slots = stack.len();
    let d = dim * n;
    let slot_of = |branch: Branch, index: usize| {
        stack
            .parts()
            .iter()
            .position(|p| p.branch == branch && p.time_index == index)
            .expect("every (branch, time) has a part")
    };

    let source: Vec<DVector<C64>> = stack
        .parts()
        .iter()
        .map(|p| labelled(p.state.as_dvector(), p.time_index, n))
        .collect();
    let mut sink = source.clone();
    let mut propagated = full_tensor(&source);

    let times = history.times();
    let path = build_path(&times, n)?;
    let index_of = |t: f64| times.iter().position(|&x| x == t).expect("path time is a fixed point");
    for seg in path.segments() {
        let (from, to) = (index_of(seg.from), index_of(seg.to));
        let slot = slot_of(seg.branch, from);
        let u = SeriesPropagator::new(sched, seg.branch).propagate(seg.from, seg.to)?;
        let op = u.kronecker(&label_swap(from, to, n));
        propagated = apply_to_slot(&propagated, &op, slot, slots, d);
        sink[slot] = labelled(history.points()[to].state.as_dvector(), to, n);
    }

    let sink = full_tensor(&sink);
    let unpropagated = full_tensor(&source);
    let identity_term = overlap(&sink, &unpropagated);
    if identity_term != C64::new(0.0, 0.0) {
        return Err(Error::NumericalCheck(format!(
            "identity-term overlap {identity_term} is not exactly zero"
        )));
    }
    let change: Vec<C64> = propagated.iter().zip(&unpropagated).map(|(a, b)| a - b).collect();
    Ok(overlap(&sink, &change).re)
}
