//! Dense matrices over [`Scalar`] with exact elimination.
//!
//! Rank and nullspace computations run in exact rational arithmetic whenever
//! every entry is exact. Matrices containing approximate entries fall back to
//! singular-value thresholding, which is best-effort by nature.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. Zero-sized dimensions are allowed so block
/// assembly of degenerate pencils stays uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer test helper.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).clone());
            }
        }
        out
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.at(r, c).clone());
            }
        }
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    if !self.at(r, k).is_zero() && !other.at(k, c).is_zero() {
                        acc = &acc + &(self.at(r, k) * other.at(k, c));
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: &Scalar) -> Mat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = &*v * s;
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v = &*v + w;
        }
        Ok(out)
    }

    /// Reduced row echelon form with the list of pivot columns.
    fn rref_exact(&self) -> Result<(Mat, Vec<usize>)> {
        if !self.is_exact() {
            return Err(Error::ApproxEntries("exact elimination"));
        }
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(p, c).clone();
                    m.set(row, c, b);
                    m.set(p, c, a);
                }
            }
            let inv = m.at(row, col).inv()?;
            for c in col..m.cols {
                m.set(row, c, m.at(row, c) * &inv);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(r, c) - &(m.at(row, c) * &factor);
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((m, pivots))
    }

    /// Rank over the exact field. Fails on approximate entries.
    pub fn rank_exact(&self) -> Result<usize> {
        Ok(self.rref_exact()?.1.len())
    }

    /// Basis of the right nullspace in reduced-echelon-derived order: one
    /// vector per free column, free columns ascending.
    pub fn right_nullspace_exact(&self) -> Result<Vec<Vec<Scalar>>> {
        let (rref, pivots) = self.rref_exact()?;
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref.at(row, free);
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Determinant of a square matrix by exact elimination.
    pub fn det_exact(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "determinant of {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.is_exact() {
            return Err(Error::ApproxEntries("det_exact"));
        }
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != col {
                det = -det;
                for c in 0..m.cols {
                    let a = m.at(col, c).clone();
                    let b = m.at(p, c).clone();
                    m.set(col, c, b);
                    m.set(p, c, a);
                }
            }
            let pivot = m.at(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv()?;
            for r in col + 1..m.rows {
                if !m.at(r, col).is_zero() {
                    let factor = m.at(r, col) * &inv;
                    for c in col..m.cols {
                        let v = m.at(r, c) - &(m.at(col, c) * &factor);
                        m.set(r, c, v);
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn to_complex_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c).to_complex())
    }

    /// Rank by singular-value thresholding at `tol * sigma_max`.
    pub fn rank_svd(&self, tol: f64) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let sv = self.to_complex_matrix().singular_values();
        let max = sv.iter().cloned().fold(0f64, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * max).count()
    }

    /// Exact rank when possible, thresholded singular values otherwise.
    pub fn rank(&self, tol: f64) -> usize {
        if self.is_exact() {
            self.rank_exact().expect("exact rank on exact matrix")
        } else {
            self.rank_svd(tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(3).rank_exact().unwrap(), 3);
        let nilpotent = Mat::from_int_rows(&[&[0, 1], &[0, 0]]);
        assert_eq!(nilpotent.rank_exact().unwrap(), 1);
        // mu-coefficient slice of the pencil with a single length-2 row block
        let r = Mat::from_int_rows(&[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(r.rank_exact().unwrap(), 2);
    }

    #[test]
    fn rank_exact_rejects_approx_entries() {
        let mut m = Mat::identity(2);
        m.set(0, 1, Scalar::approx(0.5, 0.0));
        assert_eq!(
            m.rank_exact(),
            Err(Error::ApproxEntries("exact elimination"))
        );
        assert_eq!(m.rank_svd(1e-9), 2);
    }

    #[test]
    fn nullspace_of_zero_matrix_is_standard_basis() {
        let basis = Mat::zeros(2, 2).right_nullspace_exact().unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![Scalar::one(), Scalar::zero()]);
        assert_eq!(basis[1], vec![Scalar::zero(), Scalar::one()]);
    }

    #[test]
    fn nullspace_of_row_vector() {
        let m = Mat::from_int_rows(&[&[1, 1]]);
        let basis = m.right_nullspace_exact().unwrap();
        assert_eq!(basis.len(), 1);
        // Must span (1, -1): check proportionality and the matrix equation.
        let v = &basis[0];
        assert_eq!(&v[0] + &v[1], Scalar::zero());
        assert!(!v[1].is_zero());
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let m = Mat::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank_exact().unwrap(), 2);
        for v in m.right_nullspace_exact().unwrap() {
            for r in 0..m.rows() {
                let mut acc = Scalar::zero();
                for (c, vc) in v.iter().enumerate() {
                    acc = &acc + &(m.at(r, c) * vc);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn det_matches_elimination() {
        let m = Mat::from_int_rows(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det_exact().unwrap(), Scalar::from_int(1));
        let singular = Mat::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert!(singular.det_exact().unwrap().is_zero());
    }

    #[test]
    fn svd_rank_thresholds_noise() {
        let mut m = Mat::zeros(2, 2);
        m.set(0, 0, Scalar::approx(1.0, 0.0));
        m.set(1, 1, Scalar::approx(1e-14, 0.0));
        assert_eq!(m.rank_svd(1e-9), 1);
        assert_eq!(m.rank_svd(1e-16), 2);
    }

    #[test]
    fn transpose_rank_agrees() {
        let m = Mat::from_int_rows(&[&[1, 0, 2], &[0, 0, 0]]);
        assert_eq!(m.rank_exact().unwrap(), m.transpose().rank_exact().unwrap());
    }
}
