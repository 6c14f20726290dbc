//! Row-aligned band storage.
//!
//! Every diagonal has length `N` and is indexed by row: `sub2[i] = A[i][i-2]`,
//! `sub1[i] = A[i][i-1]`, `diag[i] = A[i][i]`, `sup1[i] = A[i][i+1]`,
//! `sup2[i] = A[i][i+2]`. Slots that fall outside the matrix hold zero.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub trait BandMatrix {
    type Elem: Scalar;

    fn dim(&self) -> usize;

    /// `A x`.
    fn apply(&self, x: &[Self::Elem]) -> Vec<Self::Elem>;

    fn to_dense(&self) -> Vec<Vec<Self::Elem>>;

    /// Row-wise weak diagonal dominance `|a_ii| >= sum_{j != i} |a_ij|`.
    fn row_dominance(&self, i: usize) -> (Self::Elem, Self::Elem);

    fn is_weakly_dominant_row(&self, i: usize) -> bool {
        let (d, off) = self.row_dominance(i);
        d >= off
    }

    fn is_weakly_diagonally_dominant(&self) -> bool {
        (0..self.dim()).all(|i| self.is_weakly_dominant_row(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PentaMatrix<T> {
    pub sub2: Vec<T>,
    pub sub1: Vec<T>,
    pub diag: Vec<T>,
    pub sup1: Vec<T>,
    pub sup2: Vec<T>,
    full_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMatrix<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
    reduced_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<M: BandMatrix> {
    pub matrix: M,
    pub rhs: Vec<M::Elem>,
}

pub type PentaSystem<T> = LinearSystem<PentaMatrix<T>>;
pub type TriSystem<T> = LinearSystem<TriMatrix<T>>;

impl<T: Scalar> PentaMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub2: vec![T::zero(); n],
            sub1: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            sup1: vec![T::zero(); n],
            sup2: vec![T::zero(); n],
            full_rows: Vec::new(),
        }
    }

    /// Validates lengths, zero out-of-band slots and the `full_rows` contract
    /// (every row with a nonzero outer entry must be listed).
    pub fn from_diagonals(
        sub2: Vec<T>,
        sub1: Vec<T>,
        diag: Vec<T>,
        sup1: Vec<T>,
        sup2: Vec<T>,
        full_rows: Vec<usize>,
    ) -> Result<Self> {
        let n = diag.len();
        for v in [&sub2, &sub1, &sup1, &sup2] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut m = Self {
            sub2,
            sub1,
            diag,
            sup1,
            sup2,
            full_rows: Vec::new(),
        };
        m.set_full_rows(full_rows)?;
        Ok(m)
    }

    pub fn full_rows(&self) -> &[usize] {
        &self.full_rows
    }

    pub fn set_full_rows(&mut self, mut rows: Vec<usize>) -> Result<()> {
        let n = self.diag.len();
        rows.sort_unstable();
        rows.dedup();
        if let Some(&r) = rows.last() {
            if r >= n {
                return Err(Error::Index {
                    index: r,
                    range: format!("0..{n}"),
                });
            }
        }
        for i in 0..n {
            let outside = (i < 2 && !self.sub2[i].is_zero())
                || (i < 1 && !self.sub1[i].is_zero())
                || (i + 1 >= n && !self.sup1[i].is_zero())
                || (i + 2 >= n && !self.sup2[i].is_zero());
            if outside {
                return Err(Error::Precondition(format!("row {i} has a nonzero entry outside the matrix")));
            }
            let outer = !self.sub2[i].is_zero() || !self.sup2[i].is_zero();
            if outer && rows.binary_search(&i).is_err() {
                return Err(Error::Precondition(format!(
                    "row {i} has nonzero outer diagonals but is not listed as full"
                )));
            }
        }
        self.full_rows = rows;
        Ok(())
    }

    /// Entry `A[i][j]` (zero outside the band).
    pub fn get(&self, i: usize, j: usize) -> T {
        match j as isize - i as isize {
            -2 => self.sub2[i].clone(),
            -1 => self.sub1[i].clone(),
            0 => self.diag[i].clone(),
            1 => self.sup1[i].clone(),
            2 => self.sup2[i].clone(),
            _ => T::zero(),
        }
    }

    /// Sets row `i` over columns `first..first+values.len()`.
    pub(crate) fn set_row(&mut self, i: usize, first: usize, values: &[T]) {
        for (k, v) in values.iter().enumerate() {
            let j = first + k;
            match j as isize - i as isize {
                -2 => self.sub2[i] = v.clone(),
                -1 => self.sub1[i] = v.clone(),
                0 => self.diag[i] = v.clone(),
                1 => self.sup1[i] = v.clone(),
                2 => self.sup2[i] = v.clone(),
                _ => panic!("column {j} outside the band of row {i}"),
            }
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PentaMatrix<U> {
        PentaMatrix {
            sub2: self.sub2.iter().map(&f).collect(),
            sub1: self.sub1.iter().map(&f).collect(),
            diag: self.diag.iter().map(&f).collect(),
            sup1: self.sup1.iter().map(&f).collect(),
            sup2: self.sup2.iter().map(&f).collect(),
            full_rows: self.full_rows.clone(),
        }
    }
}

impl<T: Scalar> BandMatrix for PentaMatrix<T> {
    type Elem = T;

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].clone() * x[i].clone();
                if i >= 1 {
                    acc = acc + self.sub1[i].clone() * x[i - 1].clone();
                }
                if i >= 2 && !self.sub2[i].is_zero() {
                    acc = acc + self.sub2[i].clone() * x[i - 2].clone();
                }
                if i + 1 < n {
                    acc = acc + self.sup1[i].clone() * x[i + 1].clone();
                }
                if i + 2 < n && !self.sup2[i].is_zero() {
                    acc = acc + self.sup2[i].clone() * x[i + 2].clone();
                }
                acc
            })
            .collect()
    }

    fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn row_dominance(&self, i: usize) -> (T, T) {
        let off = self.sub2[i].abs() + self.sub1[i].abs() + self.sup1[i].abs() + self.sup2[i].abs();
        (self.diag[i].abs(), off)
    }
}

impl<T: Scalar> TriMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            sup: vec![T::zero(); n],
            reduced_rows: Vec::new(),
        }
    }

    pub fn from_diagonals(sub: Vec<T>, diag: Vec<T>, sup: Vec<T>) -> Result<Self> {
        let n = diag.len();
        for v in [&sub, &sup] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if n > 0 && (!sub[0].is_zero() || !sup[n - 1].is_zero()) {
            return Err(Error::Precondition("nonzero entry outside the matrix".into()));
        }
        Ok(Self {
            sub,
            diag,
            sup,
            reduced_rows: Vec::new(),
        })
    }

    /// Rows that carried outer entries before a pentadiagonal reduction.
    pub fn reduced_rows(&self) -> &[usize] {
        &self.reduced_rows
    }

    pub(crate) fn with_reduced_rows(mut self, rows: Vec<usize>) -> Self {
        self.reduced_rows = rows;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match j as isize - i as isize {
            -1 => self.sub[i].clone(),
            0 => self.diag[i].clone(),
            1 => self.sup[i].clone(),
            _ => T::zero(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TriMatrix<U> {
        TriMatrix {
            sub: self.sub.iter().map(&f).collect(),
            diag: self.diag.iter().map(&f).collect(),
            sup: self.sup.iter().map(&f).collect(),
            reduced_rows: self.reduced_rows.clone(),
        }
    }
}

impl<T: Scalar> BandMatrix for TriMatrix<T> {
    type Elem = T;

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].clone() * x[i].clone();
                if i >= 1 {
                    acc = acc + self.sub[i].clone() * x[i - 1].clone();
                }
                if i + 1 < n {
                    acc = acc + self.sup[i].clone() * x[i + 1].clone();
                }
                acc
            })
            .collect()
    }

    fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn row_dominance(&self, i: usize) -> (T, T) {
        (self.diag[i].abs(), self.sub[i].abs() + self.sup[i].abs())
    }
}

impl<M: BandMatrix> LinearSystem<M> {
    pub fn new(matrix: M, rhs: Vec<M::Elem>) -> Result<Self> {
        if matrix.dim() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: rhs.len(),
            });
        }
        Ok(Self { matrix, rhs })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `A x - b`.
    pub fn residual(&self, x: &[M::Elem]) -> Vec<M::Elem> {
        self.matrix
            .apply(x)
            .into_iter()
            .zip(&self.rhs)
            .map(|(ax, b)| ax - b.clone())
            .collect()
    }

    pub fn residual_inf(&self, x: &[M::Elem]) -> M::Elem {
        inf_norm(&self.residual(x))
    }
}

impl<T: Scalar> PentaSystem<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PentaSystem<U> {
        LinearSystem {
            matrix: self.matrix.map(&f),
            rhs: self.rhs.iter().map(&f).collect(),
        }
    }
}

impl<T: Scalar> TriSystem<T> {
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TriSystem<U> {
        LinearSystem {
            matrix: self.matrix.map(&f),
            rhs: self.rhs.iter().map(&f).collect(),
        }
    }
}

pub fn inf_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| {
        let a = x.abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

/// `‖a - b‖_∞`.
pub fn inf_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| {
            let d = (x.clone() - y.clone()).abs();
            if d > m {
                d
            } else {
                m
            }
        })
}
