//! Random fixtures for unit tests.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dynamics::{HamiltonianSchedule, Piece};
use crate::statespace::{Basis, HermitianOperator, StateVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOperator {
    let m = gaussian_matrix(rng, dim);
    HermitianOperator::new((&m + m.adjoint()).unscale(2.0), 1e-12).unwrap()
}

/// `pieces` Gaussian pieces tiling `[0, t_end]` at random split points.
pub fn random_schedule(rng: &mut impl Rng, dim: usize, pieces: usize, t_end: f64) -> HamiltonianSchedule {
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.05..0.95) * t_end).collect();
    cuts.sort_by(f64::total_cmp);
    let bounds: Vec<f64> = std::iter::once(0.0).chain(cuts).chain(std::iter::once(t_end)).collect();
    let pieces = bounds
        .windows(2)
        .map(|w| Piece::new(w[0], w[1], random_hermitian(rng, dim)))
        .collect();
    HamiltonianSchedule::new(pieces).unwrap()
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
    StateVector::normalized((0..dim).map(|_| gaussian(rng)).collect()).unwrap()
}

pub fn random_basis(rng: &mut impl Rng, dim: usize) -> Basis {
    let q = gaussian_matrix(rng, dim).qr().q();
    Basis::from_columns(&q, 1e-10).unwrap()
}

/// An orthonormal basis whose first element is `u` up to a phase.
pub fn basis_containing(rng: &mut impl Rng, u: &StateVector) -> Basis {
    let mut m = gaussian_matrix(rng, u.dim());
    m.set_column(0, u.as_dvector());
    let q = m.qr().q();
    Basis::from_columns(&q, 1e-10).unwrap()
}
