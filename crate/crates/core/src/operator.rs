//! Dense matrices of endomorphisms of Λ^p.
//!
//! Column `j` holds the image of the `j`-th canonical blade, so entry
//! `(i, j)` is the coefficient of blade `i` in that image.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exterior::{BladeBasis, MetricFrame, PVector};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<S> {
    dim: usize,
    degree: usize,
    matrix: Matrix<S>,
}

impl<S: Scalar> OperatorMatrix<S> {
    pub fn new(dim: usize, degree: usize, matrix: Matrix<S>) -> Result<Self> {
        let n = crate::exterior::binomial(dim, degree);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(OperatorMatrix { dim, degree, matrix })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let n = crate::exterior::binomial(dim, degree);
        OperatorMatrix { dim, degree, matrix: Matrix::zeros(n, n) }
    }

    pub fn identity(dim: usize, degree: usize) -> Self {
        let n = crate::exterior::binomial(dim, degree);
        OperatorMatrix { dim, degree, matrix: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.matrix[(row, col)]
    }

    pub fn basis(&self) -> BladeBasis {
        BladeBasis::new(self.dim, self.degree).expect("operator degree is valid")
    }

    pub fn apply(&self, v: &PVector<S>) -> Result<PVector<S>> {
        if v.degree() != self.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: v.degree() });
        }
        let basis = self.basis();
        let out = self.matrix.mul_vec(&v.coefficients(&basis));
        Ok(PVector::from_coefficients(&basis, &out))
    }

    /// Image of the `j`-th canonical blade.
    pub fn column(&self, j: usize, basis: &BladeBasis) -> PVector<S> {
        PVector::from_coefficients(basis, &self.matrix.column(j))
    }

    pub fn scale(&self, k: &S) -> Self {
        OperatorMatrix { dim: self.dim, degree: self.degree, matrix: self.matrix.scale(k) }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(OperatorMatrix { dim: self.dim, degree: self.degree, matrix: self.matrix.sub(&other.matrix)? })
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.matrix.is_zero_within(tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.degree == other.degree && self.matrix.approx_eq(&other.matrix, tol)
    }

    pub fn to_f64(&self) -> OperatorMatrix<f64> {
        OperatorMatrix { dim: self.dim, degree: self.degree, matrix: self.matrix.to_f64() }
    }

    /// Checks `Mᵀ G = G M` for the Gram matrix `G` of Λ^p.
    pub fn is_self_adjoint(&self, mf: &MetricFrame<S>, tol: f64) -> Result<bool> {
        let g = mf.gram_matrix(&self.basis());
        let lhs = self.matrix.transpose().mul(&g)?;
        let rhs = g.mul(&self.matrix)?;
        Ok(lhs.approx_eq(&rhs, tol))
    }

    /// Aligned plain-text table with blade labels.
    pub fn to_text(&self) -> String {
        let basis = self.basis();
        let labels: Vec<String> = basis.blades().iter().map(|b| b.to_string()).collect();
        let cells: Vec<Vec<String>> =
            (0..self.size()).map(|i| (0..self.size()).map(|j| self.matrix[(i, j)].to_repr()).collect()).collect();
        let width = cells.iter().flatten().chain(&labels).map(|s| s.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        let _ = write!(out, "{:>width$}", "");
        for l in &labels {
            let _ = write!(out, " {l:>width$}");
        }
        out.push('\n');
        for (l, row) in labels.iter().zip(&cells) {
            let _ = write!(out, "{l:>width$}");
            for c in row {
                let _ = write!(out, " {c:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

/// The map induced on Λ^p by a linear map `q` of ℝ^d: entry `(I, J)` is the
/// `I×J` minor of `q`.
pub fn induced_matrix<S: Scalar>(q: &Matrix<S>, p: usize) -> Result<Matrix<S>> {
    if !q.is_square() {
        return Err(Error::invalid("induced map needs a square matrix"));
    }
    let basis = BladeBasis::new(q.nrows(), p)?;
    let n = basis.len();
    let idx: Vec<Vec<usize>> = basis.blades().iter().map(|b| b.indices()).collect();
    Ok(Matrix::from_fn(n, n, |r, c| {
        let (ri, ci) = (&idx[r], &idx[c]);
        Matrix::from_fn(p, p, |a, b| q[(ri[a], ci[b])].clone()).determinant().expect("square minor")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::wedge;
    use crate::scalar::Rational;

    #[test]
    fn induced_matrix_maps_wedges() {
        let q = Matrix::from_rows(
            [[1, 2, 0], [0, 1, -1], [3, 0, 1]]
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect())
                .collect(),
        )
        .unwrap();
        let m = induced_matrix(&q, 2).unwrap();
        let u = vec![Rational::from_i64(1), Rational::from_i64(-1), Rational::from_i64(2)];
        let v = vec![Rational::from_i64(0), Rational::from_i64(3), Rational::from_i64(1)];
        let lhs = wedge(&PVector::from_vector(&q.mul_vec(&u)), &PVector::from_vector(&q.mul_vec(&v))).unwrap();
        let basis = BladeBasis::new(3, 2).unwrap();
        let uv = wedge(&PVector::from_vector(&u), &PVector::from_vector(&v)).unwrap();
        let rhs = PVector::from_coefficients(&basis, &m.mul_vec(&uv.coefficients(&basis)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_table_has_labels() {
        let op = OperatorMatrix::<Rational>::identity(3, 2);
        let t = op.to_text();
        assert!(t.contains("e0∧e1"));
        assert_eq!(t.lines().count(), 4);
    }
}
