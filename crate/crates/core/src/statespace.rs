//! Finite-dimensional complex linear algebra: states, bases, Hermitian
//! generators and unitary propagators.
//!
//! Natural units (ħ = 1) are used throughout, so a generator `H` applied for
//! a duration `s` produces `exp(−i·s·H)`.

use std::fmt;
use std::ops::Index;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A complex amplitude vector. Constructors only guarantee finiteness; unit
/// norm is checked where a state is used as a fixed point or basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Empty("state amplitudes"));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(Self(DVector::from_vec(amps)))
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let v = Self::new(amps)?;
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(Self(v.0.unscale(n)))
    }

    /// The computational basis vector `e_index`.
    pub fn basis_vector(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub(crate) fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= tol {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm })
        }
    }

    /// Multiplies every amplitude by `phase`.
    pub fn scaled(&self, phase: C64) -> Self {
        Self(self.0.map(|c| c * phase))
    }

    /// The rank-1 projector |v⟩⟨v|.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.0 * self.0.adjoint()
    }
}

impl Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", c.re, c.im)?;
        }
        write!(f, "]")
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// ⟨a|b⟩, antilinear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.0.dotc(&b.0))
}

/// Kronecker product of the parts; the leftmost part varies slowest.
pub fn tensor(parts: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = parts.split_first().ok_or(Error::Empty("tensor factors"))?;
    let v = rest
        .iter()
        .fold(first.0.clone(), |acc, p| acc.kronecker(&p.0));
    Ok(StateVector(v))
}

/// An ordered list of `dim` states spanning the space. Construction through
/// [`Basis::new`] enforces orthonormality; [`Basis::unchecked`] does not, so
/// that [`check_basis`] can be asked about arbitrary lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    elements: Vec<StateVector>,
}

impl Basis {
    pub fn new(elements: Vec<StateVector>, tol: f64) -> Result<Self> {
        let basis = Self::unchecked(elements)?;
        let deviation = basis.gram_deviation();
        if deviation <= tol {
            Ok(basis)
        } else {
            Err(Error::NotOrthonormal { deviation })
        }
    }

    /// Requires only a square shape: `dim` elements of dimension `dim`.
    pub fn unchecked(elements: Vec<StateVector>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::Empty("basis elements"))?.dim();
        for e in &elements {
            check_dims(dim, e.dim())?;
        }
        check_dims(dim, elements.len())?;
        Ok(Self { elements })
    }

    pub fn standard(dim: usize) -> Self {
        Self {
            elements: (0..dim).map(|i| StateVector::basis_vector(dim, i)).collect(),
        }
    }

    /// {(e₀+e₁)/√2, (e₀−e₁)/√2}.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector(DVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]));
        let minus = StateVector(DVector::from_vec(vec![C64::new(h, 0.0), C64::new(-h, 0.0)]));
        Self { elements: vec![plus, minus] }
    }

    /// Basis made of the columns of `m`.
    pub fn from_columns(m: &DMatrix<C64>, tol: f64) -> Result<Self> {
        let cols = m
            .column_iter()
            .map(|c| StateVector(c.into_owned()))
            .collect();
        Self::new(cols, tol)
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[StateVector] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StateVector> {
        self.elements.iter()
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let g = a.0.dotc(&b.0);
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

impl Index<usize> for Basis {
    type Output = StateVector;

    fn index(&self, i: usize) -> &StateVector {
        &self.elements[i]
    }
}

impl<'a> IntoIterator for &'a Basis {
    type Item = &'a StateVector;
    type IntoIter = std::slice::Iter<'a, StateVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// True iff the Gram matrix of `basis` is within `tol` of the identity.
pub fn check_basis(basis: &Basis, tol: f64) -> bool {
    basis.gram_deviation() <= tol
}

/// A Hermitian generator. The stored matrix is exactly Hermitian: the input
/// is accepted when its anti-Hermitian residual is within tolerance and then
/// replaced by its Hermitian part.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(DMatrix<C64>);

impl HermitianOperator {
    pub fn new(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.is_empty() {
            return Err(Error::Empty("operator entries"));
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        let residual = hermitian_residual(&m);
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        let h = (&m + m.adjoint()).unscale(2.0);
        Ok(Self(h))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn pauli_x() -> Self {
        Self(real_2x2([0.0, 1.0, 1.0, 0.0]))
    }

    pub fn pauli_y() -> Self {
        Self(DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ))
    }

    pub fn pauli_z() -> Self {
        Self(real_2x2([1.0, 0.0, 0.0, -1.0]))
    }

    /// Projector |v⟩⟨v| as an observable.
    pub fn projector(v: &StateVector) -> Self {
        Self::new(v.projector(), f64::INFINITY).expect("projector is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }
}

fn real_2x2(row_major: [f64; 4]) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &row_major.map(|x| C64::new(x, 0.0)))
}

/// ‖M − M†‖_F / max(1, ‖M‖_F).
pub fn hermitian_residual(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).norm() / m.norm().max(1.0)
}

/// A unitary matrix. [`UnitaryMatrix::new`] checks ‖U†U − I‖_F; products of
/// unitaries are formed without re-checking.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(DMatrix<C64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let u = Self(m);
        let residual = u.unitarity_residual();
        if residual <= tol {
            Ok(u)
        } else {
            Err(Error::NumericalCheck(format!("unitarity residual {residual:.3e}")))
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Wraps a matrix the caller knows to be unitary.
    pub fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · rhs`, i.e. `rhs` acts first.
    pub fn then_after(&self, rhs: &UnitaryMatrix) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        (self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(n, n)).norm()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &UnitaryMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

/// exp(−i·s·H) by spectral synthesis `V · diag(e^{−i s λ}) · V†`.
pub fn expm_hermitian(h: &HermitianOperator, s: f64) -> UnitaryMatrix {
    let n = h.dim();
    if s == 0.0 || h.0.iter().all(|c| *c == C64::new(0.0, 0.0)) {
        return UnitaryMatrix::identity(n);
    }
    let eig = h.0.clone().symmetric_eigen();
    let phases = eig.eigenvalues.map(|lambda| C64::from_polar(1.0, -s * lambda));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    UnitaryMatrix(scaled * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::series::expm_series;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plus() -> StateVector {
        Basis::hadamard()[0].clone()
    }

    #[test]
    fn inner_examples() {
        let e0 = StateVector::basis_vector(2, 0);
        let e1 = StateVector::basis_vector(2, 1);
        assert_eq!(inner(&e0, &e0).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e0, &e1).unwrap(), c(0.0, 0.0));
        let v = inner(&plus(), &e0).unwrap();
        assert!((v - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_conjugates_first_argument() {
        let a = StateVector::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let b = StateVector::basis_vector(2, 0);
        assert_eq!(inner(&a, &b).unwrap(), c(0.0, -1.0));
        assert_eq!(inner(&b, &a).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn inner_dimension_mismatch() {
        let a = StateVector::basis_vector(2, 0);
        let b = StateVector::basis_vector(3, 0);
        assert_eq!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn tensor_examples() {
        let e0 = StateVector::basis_vector(2, 0);
        let e1 = StateVector::basis_vector(2, 1);
        assert_eq!(tensor(std::slice::from_ref(&e0)).unwrap(), e0);
        assert_eq!(
            tensor(&[e0.clone(), e1.clone()]).unwrap(),
            StateVector::basis_vector(4, 1)
        );
        let n = tensor(&[plus(), e1]).unwrap().norm();
        assert!((n - 1.0).abs() < 1e-15);
        assert_eq!(tensor(&[]), Err(Error::Empty("tensor factors")));
    }

    #[test]
    fn check_basis_examples() {
        assert!(check_basis(&Basis::standard(4), 1e-10));
        let e0 = StateVector::basis_vector(2, 0);
        let repeated = Basis::unchecked(vec![e0.clone(), e0]).unwrap();
        assert!(!check_basis(&repeated, 1e-10));
        assert!(check_basis(&Basis::hadamard(), 1e-10));
    }

    #[test]
    fn basis_constructor_rejects_non_orthonormal() {
        let e0 = StateVector::basis_vector(2, 0);
        assert!(matches!(
            Basis::new(vec![e0.clone(), e0], 1e-10),
            Err(Error::NotOrthonormal { .. })
        ));
        let short = vec![StateVector::basis_vector(3, 0)];
        assert!(matches!(Basis::unchecked(short), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermitian_constructor_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::new(m, 1e-12),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn expm_zero_is_identity() {
        let u = expm_hermitian(&HermitianOperator::zeros(3), 1.7);
        assert_eq!(u, UnitaryMatrix::identity(3));
    }

    #[test]
    fn expm_sigma_z_pi_is_minus_identity() {
        let h = HermitianOperator::pauli_z();
        let u = expm_hermitian(&h, PI);
        let oracle = expm_series(h.matrix(), PI);
        let expected = -DMatrix::<C64>::identity(2, 2);
        assert!((u.matrix() - &expected).norm() < 1e-14);
        assert!((u.matrix() - &oracle).norm() < 1e-13);
    }

    #[test]
    fn expm_sigma_x_quarter_pi_closed_form() {
        let h = HermitianOperator::pauli_x();
        let s = PI / 4.0;
        let u = expm_hermitian(&h, s);
        let closed = DMatrix::<C64>::identity(2, 2).scale(s.cos())
            - h.matrix().map(|x| x * c(0.0, s.sin()));
        let oracle = expm_series(h.matrix(), s);
        assert!((u.matrix() - &closed).norm() < 1e-14);
        assert!((&oracle - &closed).norm() < 1e-14);
        assert!(u.unitarity_residual() < 1e-14);
    }

    #[test]
    fn expm_sigma_y_matches_series() {
        let h = HermitianOperator::pauli_y();
        let u = expm_hermitian(&h, 0.9);
        assert!((u.matrix() - expm_series(h.matrix(), 0.9)).norm() < 1e-14);
    }

    #[test]
    fn normalized_rejects_zero_vector() {
        assert!(StateVector::normalized(vec![c(0.0, 0.0); 2]).is_err());
        assert!(StateVector::new(vec![c(f64::NAN, 0.0)]).is_err());
    }
}
