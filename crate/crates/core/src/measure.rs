//! Branch amplitudes, constrained wavefunction changes ΔΨ and measures of
//! existence.
//!
//! For consecutive fixed points `(t_i, s_i)`, `(t_{i+1}, s_{i+1})` the
//! contour segment pair between them contributes the channel weight
//!
//! ```text
//! c^f(s_{i+1} ← s_i) · c^b(s_i ← s_{i+1})
//!   = ⟨s_{i+1}|U^f(t_{i+1},t_i)|s_i⟩ · ⟨s_i|U^b(t_i,t_{i+1})|s_{i+1}⟩
//! ```
//!
//! and ΔΨ of a history is the product of its channel weights. With a
//! branch-independent Hamiltonian the two factors are complex conjugates, so
//! every weight is real and non-negative.

use nalgebra::DMatrix;

use crate::contour::Branch;
use crate::dynamics::{propagate, HamiltonianSchedule};
use crate::error::{Error, Result};
use crate::histories::FixedPoint;
use crate::statespace::{check_basis, Basis, StateVector, UnitaryMatrix, C64};
use crate::tolerance::Tolerances;

/// Joint outcome counts above this are refused by [`chain_measure`].
pub const MAX_JOINT_OUTCOMES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub delta_psi: Vec<f64>,
    pub normalizer: f64,
    pub measures: Vec<f64>,
}

impl MeasureResult {
    fn normalize(delta_psi: Vec<f64>, degenerate: f64, err: impl Fn(f64) -> Error) -> Result<Self> {
        let normalizer: f64 = delta_psi.iter().sum();
        if !(normalizer > degenerate) {
            return Err(err(normalizer));
        }
        let measures = delta_psi.iter().map(|d| d / normalizer).collect();
        Ok(Self { delta_psi, normalizer, measures })
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.measures.iter().sum()
    }
}

fn amplitude(bra: &StateVector, u: &UnitaryMatrix, ket: &StateVector) -> C64 {
    bra.as_dvector().dotc(&(u.matrix() * ket.as_dvector()))
}

fn check_dim(sched: &HamiltonianSchedule, state: &StateVector) -> Result<()> {
    if state.dim() == sched.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: sched.dim(), found: state.dim() })
    }
}

/// `c^α = ⟨to| U^α(to.t, from.t) |from⟩`.
pub fn branch_amplitude(
    sched: &HamiltonianSchedule,
    branch: Branch,
    from: &FixedPoint,
    to: &FixedPoint,
) -> Result<C64> {
    check_dim(sched, &from.state)?;
    check_dim(sched, &to.state)?;
    let u = propagate(sched, branch, from.t, to.t)?;
    Ok(amplitude(&to.state, &u, &from.state))
}

/// Accepts a ΔΨ value as real when its imaginary part and any negative real
/// part fall within tolerance, and drops the imaginary residue.
pub fn real_delta_psi(z: C64, tol: &Tolerances) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("delta psi"));
    }
    if z.im.abs() > tol.realness || z.re < -tol.negativity {
        return Err(Error::RealnessViolation { re: z.re, im: z.im });
    }
    Ok(z.re)
}

/// Forward and backward propagators over one interval between fixed points.
struct IntervalPropagators {
    forward: UnitaryMatrix,
    backward: UnitaryMatrix,
}

impl IntervalPropagators {
    fn new(sched: &HamiltonianSchedule, earlier: f64, later: f64) -> Result<Self> {
        Ok(Self {
            forward: propagate(sched, Branch::Forward, earlier, later)?,
            backward: propagate(sched, Branch::Backward, later, earlier)?,
        })
    }

    /// `⟨hi|U^f|lo⟩ · ⟨lo|U^b|hi⟩`.
    fn channel_weight(&self, lo: &StateVector, hi: &StateVector) -> C64 {
        amplitude(hi, &self.forward, lo) * amplitude(lo, &self.backward, hi)
    }
}

fn validated_times(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::TimeOrder("strictly increasing fixed point times"));
    }
    Ok(())
}

/// Complex ΔΨ of an arbitrary sequence of fixed points, without realness
/// checks or normalization. Works for branch-dependent schedules, where the
/// value is generally complex.
pub fn delta_psi_diagnostic(sched: &HamiltonianSchedule, points: &[FixedPoint]) -> Result<C64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let times: Vec<f64> = points.iter().map(|p| p.t).collect();
    validated_times(&times)?;
    let mut product = C64::new(1.0, 0.0);
    for w in points.windows(2) {
        check_dim(sched, &w[0].state)?;
        check_dim(sched, &w[1].state)?;
        let props = IntervalPropagators::new(sched, w[0].t, w[1].t)?;
        product *= props.channel_weight(&w[0].state, &w[1].state);
    }
    Ok(product)
}

/// ΔΨ for the two-fixed-point history `src → snk`.
pub fn delta_psi_pair(
    sched: &HamiltonianSchedule,
    src: &FixedPoint,
    snk: &FixedPoint,
    tol: &Tolerances,
) -> Result<f64> {
    if !(src.t < snk.t) {
        return Err(Error::TimeOrder("source time < sink time"));
    }
    let z = delta_psi_diagnostic(sched, &[src.clone(), snk.clone()])?;
    real_delta_psi(z, tol)
}

fn require_basis(sched: &HamiltonianSchedule, basis: &Basis, tol: &Tolerances) -> Result<()> {
    if basis.dim() != sched.dim() {
        return Err(Error::DimensionMismatch { expected: sched.dim(), found: basis.dim() });
    }
    if !check_basis(basis, tol.orthonormality) {
        return Err(Error::NotOrthonormal { deviation: basis.gram_deviation() });
    }
    Ok(())
}

fn require_normalizable(sched: &HamiltonianSchedule) -> Result<()> {
    if sched.is_branch_independent() {
        Ok(())
    } else {
        Err(Error::BranchDependent)
    }
}

/// Measure of existence of each two-fixed-point history from `prep` to the
/// outcomes at `t2`, normalized over the outcome basis.
pub fn born_measure(
    sched: &HamiltonianSchedule,
    prep: &FixedPoint,
    t2: f64,
    outcomes: &Basis,
    tol: &Tolerances,
) -> Result<MeasureResult> {
    require_normalizable(sched)?;
    check_dim(sched, &prep.state)?;
    prep.validate(tol)?;
    require_basis(sched, outcomes, tol)?;
    if !(prep.t < t2) {
        return Err(Error::TimeOrder("preparation time < measurement time"));
    }
    let props = IntervalPropagators::new(sched, prep.t, t2)?;
    let delta_psi = outcomes
        .iter()
        .map(|phi| real_delta_psi(props.channel_weight(&prep.state, phi), tol))
        .collect::<Result<Vec<_>>>()?;
    MeasureResult::normalize(delta_psi, tol.degenerate, |normalizer| {
        Error::DegenerateNormalizer { normalizer }
    })
}

/// Measures over every joint outcome of a chain of interior measurements,
/// with both endpoint fixed points held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMeasure {
    /// Over all joint outcomes in row-major order (first interior slot slowest).
    pub joint: MeasureResult,
    /// Basis size of each interior slot.
    pub shape: Vec<usize>,
    pub selection: Vec<usize>,
    /// Row-major index of `selection` in `joint`.
    pub selected: usize,
}

impl ChainMeasure {
    pub fn selected_measure(&self) -> f64 {
        self.joint.measures[self.selected]
    }

    pub fn selected_delta_psi(&self) -> f64 {
        self.joint.delta_psi[self.selected]
    }

    pub fn joint_index(&self, selection: &[usize]) -> usize {
        joint_index(&self.shape, selection)
    }

    /// Inverse of [`ChainMeasure::joint_index`].
    pub fn selection_of(&self, mut index: usize) -> Vec<usize> {
        let mut sel = vec![0; self.shape.len()];
        for (slot, &n) in self.shape.iter().enumerate().rev() {
            sel[slot] = index % n;
            index /= n;
        }
        sel
    }
}

fn joint_index(shape: &[usize], selection: &[usize]) -> usize {
    shape
        .iter()
        .zip(selection)
        .fold(0, |acc, (&n, &s)| acc * n + s)
}

/// General `N_t`-point measure: ΔΨ of each joint interior selection is the
/// product of the channel weights along it; the normalizer runs over every
/// joint selection.
pub fn chain_measure(
    sched: &HamiltonianSchedule,
    endpoints: (&FixedPoint, &FixedPoint),
    interior: &[(f64, Basis)],
    selection: &[usize],
    tol: &Tolerances,
) -> Result<ChainMeasure> {
    require_normalizable(sched)?;
    let (pre, post) = endpoints;
    for p in [pre, post] {
        check_dim(sched, &p.state)?;
        p.validate(tol)?;
    }
    if selection.len() != interior.len() {
        return Err(Error::InvalidArgument(format!(
            "selection has {} entries for {} interior points",
            selection.len(),
            interior.len()
        )));
    }
    for ((_, basis), &s) in interior.iter().zip(selection) {
        require_basis(sched, basis, tol)?;
        if s >= basis.len() {
            return Err(Error::SelectionOutOfRange { index: s, size: basis.len() });
        }
    }
    let times: Vec<f64> = std::iter::once(pre.t)
        .chain(interior.iter().map(|(t, _)| *t))
        .chain(std::iter::once(post.t))
        .collect();
    validated_times(&times)?;

    let shape: Vec<usize> = interior.iter().map(|(_, b)| b.len()).collect();
    let total = shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&n| n <= MAX_JOINT_OUTCOMES)
        .ok_or_else(|| Error::TooLarge(format!("joint outcome space {shape:?}")))?;

    // Layer k holds the candidate states at times[k].
    let layers: Vec<Vec<&StateVector>> = std::iter::once(vec![&pre.state])
        .chain(interior.iter().map(|(_, b)| b.iter().collect()))
        .chain(std::iter::once(vec![&post.state]))
        .collect();
    let mut weights: Vec<DMatrix<C64>> = Vec::with_capacity(layers.len() - 1);
    for (k, w) in times.windows(2).enumerate() {
        let props = IntervalPropagators::new(sched, w[0], w[1])?;
        let (lo, hi) = (&layers[k], &layers[k + 1]);
        weights.push(DMatrix::from_fn(lo.len(), hi.len(), |i, j| {
            props.channel_weight(lo[i], hi[j])
        }));
    }

    let mut delta_psi = Vec::with_capacity(total);
    let mut sel = vec![0usize; shape.len()];
    for _ in 0..total {
        let mut z = C64::new(1.0, 0.0);
        let mut prev = 0;
        for (k, &s) in sel.iter().enumerate() {
            z *= weights[k][(prev, s)];
            prev = s;
        }
        z *= weights[shape.len()][(prev, 0)];
        delta_psi.push(real_delta_psi(z, tol)?);
        for slot in (0..sel.len()).rev() {
            sel[slot] += 1;
            if sel[slot] < shape[slot] {
                break;
            }
            sel[slot] = 0;
        }
    }

    let joint = MeasureResult::normalize(delta_psi, tol.degenerate, |normalizer| {
        Error::ImpossiblePostSelection { normalizer }
    })?;
    Ok(ChainMeasure {
        selected: joint_index(&shape, selection),
        joint,
        shape,
        selection: selection.to_vec(),
    })
}

/// Measure of each intermediate outcome between a pre- and post-selection.
pub fn abl_measure(
    sched: &HamiltonianSchedule,
    pre_sel: &FixedPoint,
    t: f64,
    outcomes: &Basis,
    post_sel: &FixedPoint,
    tol: &Tolerances,
) -> Result<MeasureResult> {
    let interior = [(t, outcomes.clone())];
    chain_measure(sched, (pre_sel, post_sel), &interior, &[0], tol).map(|c| c.joint)
}
