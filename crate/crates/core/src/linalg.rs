//! Dense exact vectors and matrices, reduced row-echelon form, and linear
//! system solving.

use num_traits::{One, Zero};

use crate::arith::{bit_size, int, Rational};
use crate::error::{Error, Result};

pub type QVector = Vec<Rational>;

pub fn zeros(n: usize) -> QVector {
    vec![Rational::zero(); n]
}

pub fn qvec(values: &[i64]) -> QVector {
    values.iter().map(|&v| int(v)).collect()
}

pub fn unit(n: usize, i: usize) -> QVector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> QVector {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rational]) -> QVector {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Row-major dense matrix. Zero-row matrices keep their column count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<QVector>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n_rows = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(QMatrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Integer matrix literal; all rows must share one length.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| qvec(r)).collect())
            .expect("ragged integer matrix")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Rational]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<QVector> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> QVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn push_row(&mut self, row: QVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> QVector {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        self.rows_iter().map(|r| dot(r, x)).collect()
    }

    /// `Mᵀ y` without materializing the transpose.
    pub fn tr_mul_vec(&self, y: &[Rational]) -> QVector {
        assert_eq!(y.len(), self.rows, "transpose-vector dimension mismatch");
        let mut out = zeros(self.cols);
        for (row, coef) in self.rows_iter().zip(y) {
            if coef.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * coef;
            }
        }
        out
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        QMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn rref(&self) -> Rref {
        rref_rank(self)
    }

    pub fn rank(&self) -> usize {
        rref_rank(self).rank
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rref: QMatrix,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

/// Gauss–Jordan elimination. Among the candidate pivots in a column the entry
/// with the fewest bits is chosen; the result is the unique RREF regardless.
pub fn rref_rank(m: &QMatrix) -> Rref {
    let mut a = m.clone();
    let mut pivot_columns = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let pivot = (r..a.rows)
            .filter(|&i| !a[(i, c)].is_zero())
            .min_by_key(|&i| bit_size(&a[(i, c)]));
        let Some(p) = pivot else { continue };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            a[(r, j)] *= &inv;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..a.cols {
                let delta = &factor * &a[(r, j)];
                a[(i, j)] -= delta;
            }
        }
        pivot_columns.push(c);
        r += 1;
    }
    Rref {
        rref: a,
        rank: r,
        pivot_columns,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: QVector,
    pub nullspace_basis: Vec<QVector>,
}

/// Solves `M x = rhs`. Returns `Ok(None)` when `rhs` is outside the range of `M`.
pub fn solve_linear_system(m: &QMatrix, rhs: &[Rational]) -> Result<Option<LinearSolution>> {
    if m.nrows() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but rhs has {} entries",
            m.nrows(),
            rhs.len()
        )));
    }
    let n = m.ncols();
    let mut aug = QMatrix::zeros(m.nrows(), n + 1);
    for i in 0..m.nrows() {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n)] = rhs[i].clone();
    }
    let Rref {
        rref,
        rank,
        pivot_columns,
    } = rref_rank(&aug);
    if pivot_columns.last() == Some(&n) {
        return Ok(None);
    }
    let mut particular = zeros(n);
    for (row, &pc) in pivot_columns.iter().enumerate() {
        particular[pc] = rref[(row, n)].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_columns.contains(c)).collect();
    let nullspace_basis = free
        .iter()
        .map(|&f| {
            let mut v = zeros(n);
            v[f] = Rational::one();
            for (row, &pc) in pivot_columns.iter().enumerate().take(rank) {
                v[pc] = -rref[(row, f)].clone();
            }
            v
        })
        .collect();
    Ok(Some(LinearSolution {
        particular,
        nullspace_basis,
    }))
}
