//! Square complex matrices stored row-compressed.
//!
//! Products accumulate every output entry in increasing inner index, so two
//! products built from the same blocks produce bit-identical entries. The
//! algebra checks (`Q1^2 = diag(H+, H-)`, `{Q1, Q2} = 0`) depend on that.

use std::io::{self, Write};
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{fmt_sig17, Wavefunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Complex64::new(v, 0.0))),
        )
    }

    /// Builds from `(row, col, value)` entries. Duplicates are summed in input
    /// order; exact zeros are dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside {dim}x{dim}");
            rows[i].push((j, v));
        }
        let mut out = Self::zeros(dim);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != ZERO {
                    out.col_idx.push(j);
                    out.values.push(acc);
                }
            }
            out.row_ptr[i + 1] = out.col_idx.len();
        }
        out
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        let dim = m.nrows();
        Self::from_triplets(
            dim,
            (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j, m[(i, j)]))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(i, j, v)| (j, i, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(i, j, v)| (i, j, v * factor)))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self * other`, accumulated in increasing inner index.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut acc = vec![ZERO; n];
        let mut touched = vec![false; n];
        let mut cols: Vec<usize> = Vec::new();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                        acc[j] = a * b;
                    } else {
                        acc[j] += a * b;
                    }
                }
            }
            cols.sort_unstable();
            for &j in &cols {
                if acc[j] != ZERO {
                    out.col_idx.push(j);
                    out.values.push(acc[j]);
                }
                touched[j] = false;
                acc[j] = ZERO;
            }
            cols.clear();
            out.row_ptr[i + 1] = out.col_idx.len();
        }
        out
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let s = Complex64::new(sign, 0.0);
        Self::from_triplets(
            self.dim,
            self.entries()
                .chain(other.entries().map(|(i, j, v)| (i, j, v * s))),
        )
    }

    /// `A B - B A`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        &a.matmul(b) - &b.matmul(a)
    }

    /// `A B + B A`.
    pub fn anticommutator(a: &Self, b: &Self) -> Self {
        &a.matmul(b) + &b.matmul(a)
    }

    /// `[[a, b], [c, d]]` with `None` for zero blocks; all blocks share one size.
    pub fn block2x2(
        a: Option<&Self>,
        b: Option<&Self>,
        c: Option<&Self>,
        d: Option<&Self>,
    ) -> Self {
        let n = [a, b, c, d]
            .iter()
            .flatten()
            .map(|m| m.dim)
            .next()
            .expect("at least one block must be given");
        let mut triplets = Vec::new();
        for (block, (ro, co)) in [a, b, c, d].into_iter().zip([(0, 0), (0, n), (n, 0), (n, n)]) {
            if let Some(m) = block {
                assert_eq!(m.dim, n, "blocks must share one size");
                triplets.extend(m.entries().map(|(i, j, v)| (i + ro, j + co, v)));
            }
        }
        Self::from_triplets(2 * n, triplets)
    }

    /// Kronecker product; index `i_self * other.dim + i_other`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.dim;
        Self::from_triplets(
            self.dim * m,
            self.entries().flat_map(|(i, j, a)| {
                other
                    .entries()
                    .map(move |(k, l, b)| (i * m + k, j * m + l, a * b))
            }),
        )
    }

    /// Square sub-block starting at `(row0, col0)`.
    pub fn sub_block(&self, row0: usize, col0: usize, size: usize) -> Self {
        assert!(row0 + size <= self.dim && col0 + size <= self.dim);
        Self::from_triplets(
            size,
            (row0..row0 + size).flat_map(|i| {
                self.row(i)
                    .filter(move |&(j, _)| j >= col0 && j < col0 + size)
                    .map(move |(j, v)| (i - row0, j - col0, v))
            }),
        )
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| self.row(i).map(|(j, a)| a * v[j]).sum())
            .collect()
    }

    pub fn apply_to(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        if psi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: psi.len(),
            });
        }
        Wavefunction::new(*psi.support(), self.apply(psi.amplitudes()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// Largest entry modulus among rows and columns where `mask` is true.
    pub fn max_abs_on(&self, mask: &[bool]) -> f64 {
        assert_eq!(mask.len(), self.dim);
        self.entries()
            .filter(|&(i, j, _)| mask[i] && mask[j])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Largest absolute row sum; bounds the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Diagonal and first off-diagonal, when the matrix is real symmetric with
    /// bandwidth one.
    pub fn as_real_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.is_real() {
            return None;
        }
        let n = self.dim;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for (i, j, v) in self.entries() {
            match j as isize - i as isize {
                0 => diag[i] = v.re,
                1 => off[i] = v.re,
                -1 => {
                    if self.get(j, i).re != v.re {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        for (i, &e) in off.iter().enumerate() {
            if self.get(i + 1, i).re != e {
                return None;
            }
        }
        Some((diag, off))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    /// `row,col,re,im` for every stored entry.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,re,im")?;
        for (i, j, v) in self.entries() {
            writeln!(out, "{i},{j},{},{}", fmt_sig17(v.re), fmt_sig17(v.im))?;
        }
        Ok(())
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(dim: usize, vals: &[(f64, f64)]) -> OperatorMatrix {
        OperatorMatrix::from_triplets(
            dim,
            vals.iter()
                .enumerate()
                .map(|(k, &(r, i))| (k / dim, k % dim, c(r, i))),
        )
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = OperatorMatrix::from_triplets(
            2,
            [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))],
        );
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn block_and_sub_block_round_trip() {
        let a = OperatorMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = OperatorMatrix::from_triplets(2, [(0, 1, c(0.0, 1.0))]);
        let m = OperatorMatrix::block2x2(Some(&a), Some(&b), None, Some(&a));
        assert_eq!(m.dim(), 4);
        assert_eq!(m.sub_block(0, 0, 2), a);
        assert_eq!(m.sub_block(0, 2, 2), b);
        assert_eq!(m.sub_block(2, 0, 2), OperatorMatrix::zeros(2));
    }

    #[test]
    fn kron_ordering_is_outer_major() {
        let sp = OperatorMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0))]);
        let id = OperatorMatrix::identity(3);
        let k = sp.kron(&id);
        assert_eq!(k.dim(), 6);
        for n in 0..3 {
            assert_eq!(k.get(n, 3 + n), c(1.0, 0.0));
        }
        assert_eq!(k.nnz(), 3);
    }

    #[test]
    fn tridiagonal_extraction() {
        let m = OperatorMatrix::from_triplets(
            3,
            [
                (0, 0, c(1.0, 0.0)),
                (0, 1, c(0.5, 0.0)),
                (1, 0, c(0.5, 0.0)),
                (1, 1, c(2.0, 0.0)),
                (2, 2, c(3.0, 0.0)),
            ],
        );
        let (d, e) = m.as_real_tridiagonal().unwrap();
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
        assert_eq!(e, vec![0.5, 0.0]);
        let wide = OperatorMatrix::from_triplets(3, [(0, 2, c(1.0, 0.0)), (2, 0, c(1.0, 0.0))]);
        assert!(wide.as_real_tridiagonal().is_none());
        let asym = OperatorMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0))]);
        assert!(asym.as_real_tridiagonal().is_none());
    }

    #[test]
    fn csv_lists_entries() {
        let m = OperatorMatrix::from_triplets(2, [(1, 0, c(2.0, -1.0))]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "row,col,re,im\n1,0,2.0000000000000000e0,-1.0000000000000000e0\n"
        );
    }

    proptest! {
        #[test]
        fn matmul_matches_dense(
            a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
            b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        ) {
            let (ma, mb) = (random_matrix(4, &a), random_matrix(4, &b));
            let sparse = ma.matmul(&mb).to_dense();
            let dense = ma.to_dense() * mb.to_dense();
            for (x, y) in sparse.iter().zip(dense.iter()) {
                prop_assert!((x - y).norm() < 1e-14);
            }
        }

        #[test]
        fn adjoint_of_product(
            a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
            b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        ) {
            let (ma, mb) = (random_matrix(3, &a), random_matrix(3, &b));
            let lhs = ma.matmul(&mb).adjoint();
            let rhs = mb.adjoint().matmul(&ma.adjoint());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }

        #[test]
        fn gram_products_are_exactly_hermitian(
            a in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 25),
        ) {
            let m = random_matrix(5, &a);
            prop_assert_eq!(m.matmul(&m.adjoint()).hermiticity_defect(), 0.0);
            prop_assert_eq!(m.adjoint().matmul(&m).hermiticity_defect(), 0.0);
        }
    }
}
