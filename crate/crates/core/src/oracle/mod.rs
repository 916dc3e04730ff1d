//! Textbook reference implementations for checking the measure module.
//!
//! Propagators here are rebuilt from Taylor series ([`series`]) or fine-step
//! Runge–Kutta integration ([`integrator`]); nothing in this module calls the
//! spectral propagator of `dynamics`.

pub mod integrator;
pub mod series;
pub mod tensor_sink;

use nalgebra::DMatrix;

pub use integrator::{contour_line_integral, evolve_rk4, LineIntegral};
pub use series::{expm_series, SeriesPropagator};
pub use tensor_sink::tensor_sink_delta_psi;

use crate::contour::Branch;
use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::statespace::{hermitian_residual, Basis, HermitianOperator, StateVector, UnitaryMatrix, C64};
use crate::tolerance::Tolerances;

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn sandwich(bra: &StateVector, u: &UnitaryMatrix, ket: &StateVector) -> C64 {
    bra.as_dvector().dotc(&(u.matrix() * ket.as_dvector()))
}

/// |⟨φ|U|ψ⟩|².
pub fn standard_born(u: &UnitaryMatrix, psi: &StateVector, phi: &StateVector) -> Result<f64> {
    same_dim(u.dim(), psi.dim())?;
    same_dim(u.dim(), phi.dim())?;
    Ok(sandwich(phi, u, psi).norm_sqr())
}

/// ABL probabilities of each outcome `a_i`, with `u1 = U(t, t₁)` and
/// `u2 = U(t₂, t)`.
pub fn abl_rule(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    psi: &StateVector,
    outcomes: &Basis,
    phi: &StateVector,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    for d in [u2.dim(), psi.dim(), phi.dim(), outcomes.dim()] {
        same_dim(u1.dim(), d)?;
    }
    let terms: Vec<f64> = outcomes
        .iter()
        .map(|a| (sandwich(phi, u2, a) * sandwich(a, u1, psi)).norm_sqr())
        .collect();
    let denom: f64 = terms.iter().sum();
    if !(denom > tol.degenerate) {
        return Err(Error::ZeroDenominator);
    }
    Ok(terms.into_iter().map(|x| x / denom).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<C64>);

impl DensityMatrix {
    pub fn new(m: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() || m.is_empty() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let residual = hermitian_residual(&m);
        if residual > tol.hermiticity {
            return Err(Error::NotHermitian { residual });
        }
        let trace = m.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tol.hermiticity {
            return Err(Error::InvalidArgument(format!("density matrix trace {trace}")));
        }
        let h = (&m + m.adjoint()).unscale(2.0);
        let min_eig = h.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -1e-10 {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(h))
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(psi.projector())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }
}

/// Tr[ρ U(t₁,t₂) Ô U(t₂,t₁)], with both propagators walked independently.
pub fn expectation(
    rho: &DensityMatrix,
    sched: &HamiltonianSchedule,
    t1: f64,
    t2: f64,
    obs: &HermitianOperator,
) -> Result<f64> {
    same_dim(sched.dim(), rho.dim())?;
    same_dim(sched.dim(), obs.dim())?;
    let walker = SeriesPropagator::new(sched, Branch::Forward);
    let there = walker.propagate(t1, t2)?;
    let back = walker.propagate(t2, t1)?;
    let value = (rho.matrix() * back * obs.matrix() * there).trace();
    if value.im.abs() > 1e-12 {
        return Err(Error::NumericalCheck(format!("expectation value {value} is not real")));
    }
    Ok(value.re)
}
