//! Dense complex linear algebra for one to four two-level parties.
//!
//! Matrices are stored row-major and capped at 16x16, which is all the
//! multi-party observables in this crate ever need. Tensor products use the
//! usual ordering: the left factor owns the most significant index, so basis
//! index `2*i + j` of a two-party space is `|i>|j>`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported matrix dimension (four two-level parties).
pub const MAX_DIM: usize = 16;

/// Largest number of two-level parties.
pub const MAX_PARTIES: usize = 4;

/// Default tolerance for matrix identity checks (max-norm of the difference).
pub const MATRIX_TOL: f64 = 1e-12;

fn check_dim(dim: usize) -> Result<()> {
    if dim.is_power_of_two() && (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

#[inline]
fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Dense square complex matrix of dimension 2, 4, 8 or 16.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        check_dim(dim)?;
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |_, _| Complex::new(T::zero(), T::zero()))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |r, col| {
            if r == col {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    fn two_by_two(e: [Complex<T>; 4]) -> Self {
        Self {
            dim: 2,
            entries: e.to_vec(),
        }
    }

    pub fn identity2() -> Self {
        Self::two_by_two([c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)])
    }

    pub fn pauli_x() -> Self {
        Self::two_by_two([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn pauli_y() -> Self {
        Self::two_by_two([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn pauli_z() -> Self {
        Self::two_by_two([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self {
            dim: d,
            entries: (0..d * d).map(|k| self.get(k % d, k / d).conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.get(i, i))
    }

    /// Max-norm of `self - other`.
    ///
    /// # Panics
    /// If the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Equality in the max-norm. Mismatched dimensions are never equal.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) < tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for col in 0..d {
                    out[r * d + col] = out[r * d + col] + a * other.entries[k * d + col];
                }
            }
        }
        Ok(Self { dim: d, entries: out })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        same_dim(self.dim, v.len())?;
        let d = self.dim;
        Ok((0..d)
            .map(|r| {
                (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                    acc + self.entries[r * d + k] * v[k]
                })
            })
            .collect())
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

// Operator sugar for same-dimension arithmetic; these panic on mismatch.
impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix add")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_mul(rhs).expect("matrix mul")
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.scale_real(-T::one())
    }
}

/// Normalized complex state vector of dimension 2, 4, 8 or 16.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Builds a state from arbitrary (nonzero) amplitudes, normalizing them.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm.is_nan() || norm <= T::zero() || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: amps })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Tensor product `|self>|other>`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| *a * *b))
            .collect();
        Self::new(amps)
    }
}

/// Tensor product of two matrices.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let dim = a.dim * b.dim;
    if dim > MAX_DIM {
        return Err(Error::DimensionOverflow(dim));
    }
    let db = b.dim;
    ComplexMatrix::from_fn(dim, |r, col| a.get(r / db, col / db) * b.get(r % db, col % db))
}

/// `ab - ba`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.try_mul(b)?.try_sub(&b.try_mul(a)?)
}

/// `<psi|m|psi>`.
pub fn expectation<T: Real>(psi: &StateVector<T>, m: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let mv = m.apply(psi.amplitudes())?;
    Ok(psi
        .amplitudes()
        .iter()
        .zip(&mv)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b))
}

/// Places a single-party 2x2 operator at `slot` of an `n`-party space.
pub fn embed<T: Real>(m: &ComplexMatrix<T>, slot: usize, n: usize) -> Result<ComplexMatrix<T>> {
    if m.dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "embed expects a 2x2 operator, got {}x{}",
            m.dim, m.dim
        )));
    }
    if n == 0 || n > MAX_PARTIES || slot >= n {
        return Err(Error::SlotOutOfRange { slot, parties: n });
    }
    let id = ComplexMatrix::identity2();
    let mut out = if slot == 0 { m.clone() } else { id.clone() };
    for k in 1..n {
        out = kron(&out, if k == slot { m } else { &id })?;
    }
    Ok(out)
}

/// Product of single-party operators, one per party, in party order.
pub fn kron_all<T: Real>(ops: &[ComplexMatrix<T>]) -> Result<ComplexMatrix<T>> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty operator list".into()))?;
    rest.iter().try_fold(first.clone(), |acc, op| kron(&acc, op))
}

/// Largest eigenvalue and a matching eigenvector of a Hermitian positive
/// semidefinite matrix, by repeated squaring of the normalized matrix.
pub fn top_eigenpair_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<(T, StateVector<T>)> {
    let mut p = m.clone();
    for _ in 0..64 {
        let scale = p.max_abs();
        if scale == T::zero() {
            break;
        }
        p = p.scale_real(T::one() / scale);
        p = &p * &p;
    }
    let d = m.dim();
    // Columns of the converged power span the top eigenspace; take the largest.
    let best = (0..d)
        .max_by(|&i, &j| {
            let ni = (0..d).fold(T::zero(), |acc, r| acc + p.get(r, i).norm_sqr());
            let nj = (0..d).fold(T::zero(), |acc, r| acc + p.get(r, j).norm_sqr());
            ni.partial_cmp(&nj).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let column: Vec<Complex<T>> = (0..d).map(|r| p.get(r, best)).collect();
    let v = match StateVector::new(column) {
        Ok(v) => v,
        // Zero matrix: every vector is a top eigenvector.
        Err(Error::ZeroNorm) => StateVector::basis(d, 0)?,
        Err(e) => return Err(e),
    };
    let lambda = expectation(&v, m)?.re;
    Ok((lambda, v))
}
