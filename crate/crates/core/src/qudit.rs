//! Dense complex matrices, spin angular-momentum operators and the
//! matrix functions built on them.
//!
//! All matrices use the descending-m basis: index 0 is m = I, the last
//! index is m = -I.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute per-entry tolerance for matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix of dimension >= 2.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::BadShape {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major rows. Panics on ragged or undersized input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let d = rows.len();
        assert!(d >= 2, "matrix dimension must be >= 2");
        assert!(
            rows.iter().all(|r| r.len() == d),
            "rows must form a square matrix"
        );
        Self(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 2, "matrix dimension must be >= 2");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 2, "matrix dimension must be >= 2");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 2, "matrix dimension must be >= 2");
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(
            diag.len(),
            |i, j| if i == j { diag[i] } else { c(0.0, 0.0) },
        )
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.0[(i, j)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff(other) <= tol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Infinity norm of `U†U - 1`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.adjoint().0 * &self.0;
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.0[(i, j)].norm() <= tol))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "dimension mismatch");
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            write!(f, "  ")?;
            for j in 0..self.dim() {
                let z = self.0[(i, j)];
                write!(f, "{:>9.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

/// Spin quantum number stored as 2I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };
    pub const THREE_HALVES: Spin = Spin { twice: 3 };
    pub const SEVEN_HALVES: Spin = Spin { twice: 7 };

    pub fn new(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidSpin(value));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self { twice })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Hilbert-space dimension 2I + 1.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Magnetic quantum numbers in basis order (descending).
    pub fn m_values(self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.value() - k as f64).collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Cartesian angular-momentum operators (units of hbar).
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: Spin,
    pub ix: ComplexMatrix,
    pub iy: ComplexMatrix,
    pub iz: ComplexMatrix,
}

impl SpinOperators {
    /// Raising operator I+ = Ix + i Iy.
    pub fn raising(&self) -> ComplexMatrix {
        &self.ix + &self.iy.scale(c(0.0, 1.0))
    }

    pub fn casimir(&self) -> ComplexMatrix {
        &(&(&self.ix * &self.ix) + &(&self.iy * &self.iy)) + &(&self.iz * &self.iz)
    }
}

/// Standard angular-momentum matrices in the descending-m basis.
pub fn spin_operators(spin: Spin) -> SpinOperators {
    let d = spin.dim();
    let j = spin.value();
    let m = spin.m_values();
    // <m+1| I+ |m> sits at (k-1, k) in descending order.
    let mut plus = ComplexMatrix::zeros(d);
    for (k, &mk) in m.iter().enumerate().skip(1) {
        plus.set(k - 1, k, c((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0));
    }
    let minus = plus.adjoint();
    let ix = (&plus + &minus).scale_real(0.5);
    let iy = (&plus - &minus).scale(c(0.0, -0.5));
    let iz = ComplexMatrix::from_real_diagonal(&m);
    SpinOperators { spin, ix, iy, iz }
}

/// exp(i s H) for Hermitian H, via eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let dev = h.hermitian_deviation();
    if dev > DEFAULT_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (&h.0 + h.0.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let v = eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|lambda| c(0.0, s * lambda).exp()));
    Ok(ComplexMatrix(&v * phases * v.adjoint()))
}

/// Global-phase-insensitive gate fidelity |Tr(U†V)| / d.
pub fn gate_fidelity_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    u.check_same_dim(v)?;
    Ok(((u.adjoint() * v.clone()).trace().norm() / u.dim() as f64).min(1.0))
}

/// The phase e^{iφ} minimizing ‖V - e^{iφ}U‖, i.e. arg Tr(U†V).
pub fn relative_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64> {
    u.check_same_dim(v)?;
    let t = (u.adjoint() * v.clone()).trace();
    Ok(if t.norm() == 0.0 {
        c(1.0, 0.0)
    } else {
        t / t.norm()
    })
}

/// U ρ U†.
pub fn conjugate(rho: &ComplexMatrix, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    rho.check_same_dim(u)?;
    Ok(&(u * rho) * &u.adjoint())
}
