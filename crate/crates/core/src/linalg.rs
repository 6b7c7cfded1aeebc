//! Dense real and complex linear algebra.
//!
//! Deliberately small: the toolkit only needs vectors, row-major matrices,
//! Kronecker products, traces and a positive semidefiniteness test. All
//! stored `UnitVector`s are normalized at construction so downstream code
//! can rely on inner products staying inside `[-1, 1]` up to rounding.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};


use crate::error::{Error, Result};
use crate::tolerances;

pub type Complex64 = num_complex::Complex<f64>;

/// Real vector of Euclidean norm 1.
///
/// Construction normalizes the input, so the invariant holds to machine
/// precision; a zero (or sub-`1e-12`) input is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    components: Vec<f64>,
}

impl UnitVector {
    /// Normalizes `components` to unit length.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("empty vector".to_string()));
        }
        let norm = norm(&components);
        if !norm.is_finite() || norm < tolerances::CONSTRUCTION {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite vector".to_string(),
            ));
        }
        let components = components.into_iter().map(|x| x / norm).collect();
        Ok(UnitVector { components })
    }

    /// The standard basis vector `e_axis` in `dim` dimensions.
    pub fn axis(dim: usize, axis: usize) -> Result<Self> {
        if dim == 0 || axis >= dim {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut components = vec![0.0; dim];
        components[axis] = 1.0;
        Ok(UnitVector { components })
    }

    /// Skips normalization. Caller must guarantee unit norm; used by
    /// samplers that already divide by the norm.
    pub(crate) fn from_normalized(components: Vec<f64>) -> Self {
        debug_assert!((norm(&components) - 1.0).abs() < 1e-9);
        UnitVector { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Euclidean inner product. Lies in `[-1, 1]` up to rounding by
    /// Cauchy-Schwarz; no clamping is applied.
    pub fn dot(&self, other: &UnitVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(dot(&self.components, &other.components))
    }

    /// The antipodal vector.
    pub fn negated(&self) -> UnitVector {
        UnitVector {
            components: self.components.iter().map(|x| -x).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("empty matrix".to_string()));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(RealMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds from rows, which must all have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty matrix".to_string()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument(
                "rows have unequal lengths".to_string(),
            ));
        }
        let entries = rows.iter().flatten().copied().collect();
        RealMatrix::new(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        RealMatrix::new(rows, cols, vec![0.0; rows.checked_mul(cols).unwrap_or(0)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut entries = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = self[(i, j)];
            }
        }
        RealMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scaled(&self, factor: f64) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Row-major dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("empty matrix".to_string()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> ComplexMatrix {
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scaled_re(&self, factor: f64) -> ComplexMatrix {
        self.scaled(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = ComplexMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let aij = self[(i, j)];
                if aij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "vector length {} does not match dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `tr(self * other)` in `O(dim^2)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Result<Complex64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                t += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(t)
    }

    /// Largest entry modulus; convenient for residual checks.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest deviation from hermiticity, `max |m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    /// Tests positive semidefiniteness by attempting a Cholesky
    /// factorization of `self + floor * I`. The shift tolerates eigenvalues
    /// down to `-floor`, which is what rounding noise on an exactly PSD
    /// matrix produces. The matrix must already be (numerically) Hermitian.
    pub fn is_positive_semidefinite(&self, floor: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self[(j, j)].re + floor;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let djj = libm::sqrt(d);
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }

    fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}
