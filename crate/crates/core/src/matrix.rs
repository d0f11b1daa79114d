//! Dense matrices over exact rings.
//!
//! `Matrix<T>` works for any [`Ring`]; exact elimination (RREF, rank,
//! nullspace, inverses) is available over a [`Field`], and determinants,
//! adjugates and unit-determinant inverses over polynomial rings.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Ring};
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc = acc + a.clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-block `[r0, r0+nr) x [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<T>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && *self == -self.transpose()
    }

    /// Commutator `self*other - other*self`.
    pub fn commutator(&self, other: &Matrix<T>) -> Self {
        &(self * other) - &(other * self)
    }

    /// Determinant by cofactor expansion memoized over column subsets.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let rows: Vec<usize> = (0..self.rows).collect();
        let table = self.minor_table(&rows);
        table[(1usize << self.cols) - 1].clone()
    }

    /// Classical adjugate: `adj * self = det * Id`.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        let full = (1usize << n) - 1;
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let table = self.minor_table(&rows);
            for j in 0..n {
                let minor = table[full & !(1 << j)].clone();
                adj[(j, i)] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        adj
    }

    /// `table[S]` = determinant of the rows `rows[0..|S|]` against the
    /// columns in the bitset `S` (in increasing order).
    fn minor_table(&self, rows: &[usize]) -> Vec<T> {
        let n = self.cols;
        let mut table = vec![T::zero(); 1 << n];
        table[0] = T::one();
        for s in 1usize..(1 << n) {
            let k = s.count_ones() as usize;
            if k > rows.len() {
                continue;
            }
            let r = rows[k - 1];
            let mut acc = T::zero();
            for j in 0..n {
                if s & (1 << j) == 0 {
                    continue;
                }
                let a = &self[(r, j)];
                let sub = &table[s & !(1 << j)];
                if a.is_zero() || sub.is_zero() {
                    continue;
                }
                let greater = (s >> (j + 1)).count_ones();
                let term = a.clone() * sub.clone();
                acc = if greater % 2 == 0 { acc + term } else { acc - term };
            }
            table[s] = acc;
        }
        table
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = std::mem::replace(&mut out[(i, j)], T::zero());
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }
}

impl<T: Ring> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Ring> $tr<Matrix<T>> for Matrix<T> {
            type Output = Matrix<T>;
            fn $m(self, rhs: Matrix<T>) -> Matrix<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Ring> $tr<&Matrix<T>> for Matrix<T> {
            type Output = Matrix<T>;
            fn $m(self, rhs: &Matrix<T>) -> Matrix<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Ring> $tr<Matrix<T>> for &Matrix<T> {
            type Output = Matrix<T>;
            fn $m(self, rhs: Matrix<T>) -> Matrix<T> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Ring> Neg for Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        -&self
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<&T> = (0..self.cols).map(|j| &self.data[i * self.cols + j]).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Result of exact Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    /// Reduced row echelon form. Pivot choice is deterministic: columns are
    /// scanned left to right and the first row with a nonzero entry is used.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = F::one() / m[(r, c)].clone();
            for j in c..m.cols {
                let v = m[(r, j)].clone() * inv.clone();
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{v : self * v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let Rref { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space: the original pivot columns.
    pub fn column_space(&self) -> Vec<Vec<F>> {
        self.rref().pivots.iter().map(|&c| self.column(c)).collect()
    }

    /// A particular solution of `self * x = b` (free variables set to zero).
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hcat(&Matrix::from_columns(self.rows, &[b.to_vec()]));
        let Rref { reduced, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = reduced[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hcat(&Self::identity(n));
        let Rref { reduced, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(reduced.block(0, n, n, n))
    }

    /// Determinant by elimination.
    pub fn det_field(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return F::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / piv.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }
}

/// `true` when the column spans of `a` and `b` coincide (mutual containment).
pub fn same_column_span<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> bool {
    let ra = a.rank();
    ra == b.rank() && ra == a.hcat(b).rank()
}

/// `true` when `v` lies in the column span of `a`.
pub fn in_column_span<F: Field>(a: &Matrix<F>, v: &[F]) -> bool {
    let col = Matrix::from_columns(a.rows(), &[v.to_vec()]);
    a.rank() == a.hcat(&col).rank()
}

impl<F: Field> Matrix<Poly<F>> {
    pub fn eval(&self, point: &[F]) -> Result<Matrix<F>> {
        let data = self.data.iter().map(|p| p.eval(point)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn derivative(&self, var: usize) -> Self {
        self.map(|p| p.derivative(var))
    }

    pub fn constant(m: &Matrix<F>) -> Self {
        m.map(|x| Poly::constant(x.clone()))
    }

    /// Inverse with polynomial entries; requires a nonzero constant determinant.
    pub fn inverse_polynomial(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        match det.as_constant() {
            Some(c) => {
                let inv = F::one() / c;
                Ok(self.adjugate().map(|p| p.scale(&inv)))
            }
            None => Err(Error::NonPolynomialInverse(det.to_string())),
        }
    }
}
