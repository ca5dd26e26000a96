//! Dense linear algebra over GF(q): reduced row echelon form, solving and
//! kernel vectors.
//!
//! Pivoting is deterministic (first nonzero entry scanning down the column),
//! and kernel vectors are taken with the last free variable set to one and
//! all other free variables zero, so independent implementations agree.

use thiserror::Error;

use crate::field::{Fe, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("linear system is underdetermined (rank {rank} < {unknowns} unknowns)")]
    Underdetermined { rank: usize, unknowns: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Fe] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[Fe]) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn mul_vec(&self, field: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| field.dot(self.row(r), v)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (top, bottom) = self.data.split_at_mut(hi * self.cols);
        top[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut bottom[..self.cols]);
    }

    // row[dst] -= factor * row[src]
    fn axpy_row(&mut self, field: &Field, dst: usize, src: usize, factor: Fe, from_col: usize) {
        let cols = self.cols;
        for c in from_col..cols {
            let s = self.data[src * cols + c];
            if !s.is_zero() {
                let d = &mut self.data[dst * cols + c];
                *d = field.sub(*d, field.mul(factor, s));
            }
        }
    }

    /// Reduces `self` in place to reduced row echelon form over the first
    /// `limit` columns and returns the pivot columns in order.
    pub fn rref_limited(&mut self, field: &Field, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = field.inv(self.get(r, c)).expect("pivot is nonzero");
            for x in self.row_mut(r)[c..].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for i in 0..self.rows {
                if i != r {
                    let f = self.get(i, c);
                    if !f.is_zero() {
                        self.axpy_row(field, i, r, f, c);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self, field: &Field) -> Vec<usize> {
        let cols = self.cols;
        self.rref_limited(field, cols)
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.clone().rref(field).len()
    }
}

/// Solves `a · x = b`. Fails if inconsistent or if the solution is not unique.
pub fn solve(field: &Field, a: &Matrix, b: &[Fe]) -> Result<Vec<Fe>, SolveError> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for (r, &br) in b.iter().enumerate() {
        aug.row_mut(r)[..n].copy_from_slice(a.row(r));
        aug.set(r, n, br);
    }
    let pivots = aug.rref_limited(field, n);
    let rank = pivots.len();
    if (rank..aug.rows()).any(|r| !aug.get(r, n).is_zero()) {
        return Err(SolveError::Inconsistent);
    }
    if rank < n {
        return Err(SolveError::Underdetermined { rank, unknowns: n });
    }
    Ok((0..n).map(|r| aug.get(r, n)).collect())
}

/// A nonzero vector of the right kernel of `a`, or `None` when the kernel is
/// trivial. The last free variable is set to one, the others to zero.
pub fn kernel_vector(field: &Field, a: &Matrix) -> Option<Vec<Fe>> {
    let mut m = a.clone();
    let pivots = m.rref(field);
    let n = m.cols();
    let free = (0..n).rev().find(|c| !pivots.contains(c))?;
    let mut x = vec![Fe::ZERO; n];
    x[free] = Fe::ONE;
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = field.neg(m.get(r, free));
    }
    Some(x)
}

/// A basis of the right kernel of `a`.
pub fn kernel_basis(field: &Field, a: &Matrix) -> Vec<Vec<Fe>> {
    let mut m = a.clone();
    let pivots = m.rref(field);
    let n = m.cols();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Fe::ZERO; n];
            x[free] = Fe::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = field.neg(m.get(r, free));
            }
            x
        })
        .collect()
}

/// Inverse of a square matrix, if it is invertible.
pub fn invert(field: &Field, a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut aug = Matrix::zeros(n, 2 * n);
    for r in 0..n {
        aug.row_mut(r)[..n].copy_from_slice(a.row(r));
        aug.set(r, n + r, Fe::ONE);
    }
    if aug.rref_limited(field, n).len() < n {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for r in 0..n {
        inv.row_mut(r).copy_from_slice(&aug.row(r)[n..]);
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(f: &Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let data: Vec<Vec<Fe>> = (0..rows)
            .map(|_| (0..cols).map(|_| f.random(rng)).collect())
            .collect();
        Matrix::from_rows(&data)
    }

    #[test]
    fn solve_recovers_planted_solution() {
        let f = Field::gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut solved = 0;
        for _ in 0..50 {
            let a = random_matrix(&f, 8, 6, &mut rng);
            let x: Vec<Fe> = (0..6).map(|_| f.random(&mut rng)).collect();
            let b = a.mul_vec(&f, &x);
            match solve(&f, &a, &b) {
                Ok(y) => {
                    assert_eq!(y, x);
                    solved += 1;
                }
                Err(SolveError::Underdetermined { .. }) => assert!(a.rank(&f) < 6),
                Err(e) => panic!("{e}"),
            }
        }
        assert!(solved > 40);
    }

    #[test]
    fn inconsistent_detected() {
        let f = Field::new(5, 1).unwrap();
        let a = Matrix::from_rows(&[vec![Fe::ONE], vec![Fe::ONE]]);
        assert_eq!(
            solve(&f, &a, &[f.alpha(1), f.alpha(2)]),
            Err(SolveError::Inconsistent)
        );
    }

    #[test]
    fn kernel_vectors_are_in_kernel() {
        let f = Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let a = random_matrix(&f, 4, 7, &mut rng);
            let v = kernel_vector(&f, &a).expect("wide matrix has a kernel");
            assert!(v.iter().any(|x| !x.is_zero()));
            assert!(a.mul_vec(&f, &v).iter().all(|x| x.is_zero()));
            let basis = kernel_basis(&f, &a);
            assert_eq!(basis.len(), 7 - a.rank(&f));
            for b in basis {
                assert!(a.mul_vec(&f, &b).iter().all(|x| x.is_zero()));
            }
        }
        let id = Matrix::from_rows(&[vec![Fe::ONE, Fe::ZERO], vec![Fe::ZERO, Fe::ONE]]);
        assert!(kernel_vector(&f, &id).is_none());
    }

    #[test]
    fn kernel_vector_sets_last_free_variable() {
        let f = Field::new(5, 1).unwrap();
        // x0 + x1 + x2 = 0: free variables x1, x2, pick x2 = 1, x1 = 0
        let a = Matrix::from_rows(&[vec![Fe::ONE, Fe::ONE, Fe::ONE]]);
        let v = kernel_vector(&f, &a).unwrap();
        assert_eq!(v, vec![f.alpha(4), Fe::ZERO, Fe::ONE]);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&f, 5, 5, &mut rng);
        let inv = invert(&f, &a).expect("random 5x5 over GF(256) is invertible w.h.p.");
        for c in 0..5 {
            let e: Vec<Fe> = (0..5)
                .map(|r| if r == c { Fe::ONE } else { Fe::ZERO })
                .collect();
            let col: Vec<Fe> = (0..5).map(|r| inv.get(r, c)).collect();
            assert_eq!(a.mul_vec(&f, &col), e);
        }
    }
}
