//! Seeded random scenarios for property testing.
//!
//! Hamiltonian pieces are complex Gaussian matrices made Hermitian with
//! `(M + M†)/2`, custom bases are the Q factor of a complex Gaussian matrix,
//! and states are normalized complex Gaussian vectors. The schedule always
//! covers `[0, T]` with `T ∈ [0.5, 2)`.

use std::collections::BTreeMap;

use fpf_core::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::CliError;
use crate::scenario::{
    Complex, FixedPointSpec, HamiltonianSpec, PieceSpec, QuerySpec, Scenario, ScenarioSpec,
    SlotSpec, StateSpec,
};
use crate::SCHEMA_VERSION;

pub const DIM_RANGE: std::ops::RangeInclusive<usize> = 2..=8;
pub const PIECES_RANGE: std::ops::RangeInclusive<usize> = 1..=4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum QueryKind {
    Born,
    Abl,
    Chain,
    Network,
    Validate,
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn pair(z: C64) -> Complex {
    [z.re, z.im]
}

fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

fn rows(m: &DMatrix<C64>) -> Vec<Vec<Complex>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

fn hermitian(rng: &mut impl Rng, dim: usize) -> Vec<Vec<Complex>> {
    let m = gaussian_matrix(rng, dim);
    rows(&(&m + m.adjoint()).unscale(2.0))
}

fn unit_vector(rng: &mut impl Rng, dim: usize) -> Vec<Complex> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| pair(z / norm)).collect()
}

fn basis(rng: &mut impl Rng, dim: usize) -> Vec<Vec<Complex>> {
    let q = gaussian_matrix(rng, dim).qr().q();
    q.column_iter().map(|c| c.iter().map(|&z| pair(z)).collect()).collect()
}

/// A scenario that is a pure function of its arguments.
pub fn random_scenario(seed: u64, dim: usize, n_pieces: usize, kind: QueryKind) -> Result<Scenario, CliError> {
    random_spec(seed, dim, n_pieces, kind)?.validate()
}

pub fn random_spec(seed: u64, dim: usize, n_pieces: usize, kind: QueryKind) -> Result<ScenarioSpec, CliError> {
    if !DIM_RANGE.contains(&dim) {
        return Err(CliError::validation("dim", format!("{dim} is outside {DIM_RANGE:?}")));
    }
    if !PIECES_RANGE.contains(&n_pieces) {
        return Err(CliError::validation("pieces", format!("{n_pieces} is outside {PIECES_RANGE:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_end: f64 = rng.random_range(0.5..2.0);
    let mut cuts: Vec<f64> = (1..n_pieces).map(|_| rng.random_range(0.05..0.95) * t_end).collect();
    cuts.sort_by(f64::total_cmp);
    let bounds: Vec<f64> = std::iter::once(0.0).chain(cuts).chain(std::iter::once(t_end)).collect();
    let pieces = bounds
        .windows(2)
        .map(|w| PieceSpec { t_start: w[0], t_end: w[1], h: hermitian(&mut rng, dim) })
        .collect();

    let interior_time = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| lo + (hi - lo) * rng.random_range(0.1..0.9);
    let explicit = |rng: &mut ChaCha8Rng, t: f64| FixedPointSpec { t, state: StateSpec::Vector(unit_vector(rng, dim)) };

    let mut bases = BTreeMap::new();
    let (fixed_points, query) = match kind {
        QueryKind::Born => {
            bases.insert("b0".to_string(), basis(&mut rng, dim));
            let prep = explicit(&mut rng, 0.0);
            (vec![prep], QuerySpec::Born { prep: 0, t: t_end, basis: "b0".into() })
        }
        QueryKind::Abl => {
            bases.insert("b0".to_string(), basis(&mut rng, dim));
            let pre = explicit(&mut rng, 0.0);
            let post = explicit(&mut rng, t_end);
            let t = interior_time(&mut rng, 0.0, t_end);
            (vec![pre, post], QuerySpec::Abl { pre: 0, post: 1, t, basis: "b0".into() })
        }
        QueryKind::Chain => {
            bases.insert("b0".to_string(), basis(&mut rng, dim));
            bases.insert("b1".to_string(), basis(&mut rng, dim));
            let pre = explicit(&mut rng, 0.0);
            let post = explicit(&mut rng, t_end);
            let t1 = interior_time(&mut rng, 0.0, t_end / 2.0);
            let t2 = interior_time(&mut rng, t_end / 2.0, t_end);
            let selection = vec![rng.random_range(0..dim), rng.random_range(0..dim)];
            let interior = vec![
                SlotSpec { t: t1, basis: "b0".into() },
                SlotSpec { t: t2, basis: "b1".into() },
            ];
            (vec![pre, post], QuerySpec::Chain { pre: 0, post: 1, interior, selection })
        }
        QueryKind::Network => {
            bases.insert("b0".to_string(), basis(&mut rng, dim));
            let t1 = interior_time(&mut rng, 0.0, t_end);
            let layers = vec![
                SlotSpec { t: 0.0, basis: "z".into() },
                SlotSpec { t: t1, basis: "b0".into() },
                SlotSpec { t: t_end, basis: "z".into() },
            ];
            (Vec::new(), QuerySpec::Network { layers })
        }
        QueryKind::Validate => (Vec::new(), QuerySpec::Validate),
    };

    Ok(ScenarioSpec {
        schema: SCHEMA_VERSION,
        dim,
        hamiltonian: HamiltonianSpec { pieces, branch_override: None },
        bases,
        fixed_points,
        query,
        tolerances: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [QueryKind; 5] =
        [QueryKind::Born, QueryKind::Abl, QueryKind::Chain, QueryKind::Network, QueryKind::Validate];

    #[test]
    fn same_seed_same_bytes() {
        for kind in KINDS {
            let a = random_scenario(1, 2, 2, kind).unwrap().to_json();
            let b = random_scenario(1, 2, 2, kind).unwrap().to_json();
            assert_eq!(a, b);
            assert_ne!(a, random_scenario(2, 2, 2, kind).unwrap().to_json());
        }
    }

    #[test]
    fn generated_scenarios_parse() {
        for seed in 0..20 {
            for kind in KINDS {
                let dim = 2 + (seed as usize % 7);
                let s = random_scenario(seed, dim, 1 + seed as usize % 4, kind).unwrap();
                let again = crate::parse_scenario(s.to_json().as_bytes()).unwrap();
                assert_eq!(s, again);
            }
        }
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(random_scenario(0, 1, 1, QueryKind::Born).is_err());
        assert!(random_scenario(0, 9, 1, QueryKind::Born).is_err());
        assert!(random_scenario(0, 2, 0, QueryKind::Born).is_err());
        assert!(random_scenario(0, 2, 5, QueryKind::Born).is_err());
    }
}
