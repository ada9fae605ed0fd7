//! Dense integer matrices and the Smith normal form.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

/// Row-major `i64` matrix. Zero rows or columns are allowed, which is how
/// maps into or out of the trivial group are written.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when there are
    /// no rows.
    pub fn from_rows_with_cols<R: AsRef<[i64]>>(rows: &[R], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_columns<C: AsRef<[i64]>>(rows: usize, columns: &[C]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.cols).map(|j| self.column(j))
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Self {
        assert_eq!(self.rows, other.rows, "hconcat needs equal row counts");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Restriction to the first `cols` columns.
    pub fn take_columns(&self, range: std::ops::Range<usize>) -> Self {
        let cols: Vec<Vec<i64>> = range.map(|j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    /// Restriction to a range of rows.
    pub fn take_rows(&self, range: std::ops::Range<usize>) -> Self {
        let rows: Vec<&[i64]> = range.map(|i| self.row(i)).collect();
        Self::from_rows_with_cols(&rows, self.cols)
    }

    /// Determinant by fraction-free elimination. Square matrices only.
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        if n == 0 {
            1
        } else {
            sign * a[n - 1][n - 1]
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += c * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += c * v;
        }
    }

    /// `col[dst] += c * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += c * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal, its nonzero
/// entries positive and each dividing the next. The inverses of `u` and `v`
/// are tracked alongside.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    pub rank: usize,
}

impl Snf {
    /// The diagonal entries, `min(rows, cols)` of them.
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)])
            .collect()
    }
}

/// `a / b` rounded to the nearest integer, keeping remainders at most
/// `|b| / 2` so the transforms grow slowly.
fn nearest_quotient(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    let r = a - q * b;
    if 2 * r > b.abs() {
        q + b.signum()
    } else {
        q
    }
}

struct Reducer {
    d: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        if c != 0 {
            self.d.add_row(dst, src, c);
            self.u.add_row(dst, src, c);
            self.u_inv.add_col(src, dst, -c);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        if c != 0 {
            self.d.add_col(dst, src, c);
            self.v.add_col(dst, src, c);
            self.v_inv.add_row(src, dst, -c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        // the inverse of a sign flip is itself, applied to the column
        for r in 0..self.u_inv.rows {
            self.u_inv[(r, i)] = -self.u_inv[(r, i)];
        }
    }

    /// Smallest nonzero `|entry|` in the lower-right block starting at `t`.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows {
            for j in t..self.d.cols {
                let x = self.d[(i, j)].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < self.d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn move_to_pivot(&mut self, t: usize, (i, j): (usize, usize)) {
        self.swap_rows(t, i);
        self.swap_cols(t, j);
    }

    /// Clears row and column `t` outside the pivot. Returns false if some
    /// remainder is left, in which case a smaller pivot has been moved in.
    fn clear_cross(&mut self, t: usize) -> bool {
        let p = self.d[(t, t)];
        let mut clean = true;
        for i in t + 1..self.d.rows {
            let q = nearest_quotient(self.d[(i, t)], p);
            self.add_row(i, t, -q);
            clean &= self.d[(i, t)] == 0;
        }
        for j in t + 1..self.d.cols {
            let q = nearest_quotient(self.d[(t, j)], p);
            self.add_col(j, t, -q);
            clean &= self.d[(t, j)] == 0;
        }
        if !clean {
            let mut best = (t, t);
            for i in t + 1..self.d.rows {
                let x = self.d[(i, t)].abs();
                if x != 0 && x < self.d[best].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..self.d.cols {
                let x = self.d[(t, j)].abs();
                if x != 0 && x < self.d[best].abs() {
                    best = (t, j);
                }
            }
            self.move_to_pivot(t, best);
        }
        clean
    }
}

pub fn smith_normal_form(m: &Matrix) -> Snf {
    let mut r = Reducer {
        d: m.clone(),
        u: Matrix::identity(m.rows),
        u_inv: Matrix::identity(m.rows),
        v: Matrix::identity(m.cols),
        v_inv: Matrix::identity(m.cols),
    };
    let mut t = 0;
    while t < m.rows.min(m.cols) {
        let Some(pos) = r.min_entry(t) else { break };
        r.move_to_pivot(t, pos);
        loop {
            if !r.clear_cross(t) {
                continue;
            }
            let p = r.d[(t, t)];
            let offender = (t + 1..r.d.rows)
                .find(|&i| (t + 1..r.d.cols).any(|j| r.d[(i, j)] % p != 0));
            match offender {
                // pulling the row up leaves a remainder in row t
                Some(i) => r.add_row(t, i, 1),
                None => break,
            }
        }
        if r.d[(t, t)] < 0 {
            r.negate_row(t);
        }
        t += 1;
    }
    Snf {
        u: r.u,
        u_inv: r.u_inv,
        d: r.d,
        v: r.v,
        v_inv: r.v_inv,
        rank: t,
    }
}

/// Basis (as columns) of the integer kernel `{x : m x = 0}`.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let snf = smith_normal_form(m);
    snf.v.take_columns(snf.rank..m.cols)
}

/// Some integer solution of `a y = b`, if one exists.
pub fn solve(a: &Matrix, b: &[i64]) -> Option<Vec<i64>> {
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let mut z = vec![0; a.cols];
    for (i, &ci) in c.iter().enumerate() {
        if i < snf.rank {
            let di = snf.d[(i, i)];
            if ci % di != 0 {
                return None;
            }
            z[i] = ci / di;
        } else if ci != 0 {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Whether `b` lies in the lattice spanned by the columns of `a`.
pub fn in_column_span(a: &Matrix, b: &[i64]) -> bool {
    solve(a, b).is_some()
}

/// A basis (linearly independent columns) of the lattice spanned by the
/// columns of `a`.
pub fn column_basis(a: &Matrix) -> Matrix {
    let snf = smith_normal_form(a);
    // colspan(a) = u^-1 colspan(d)
    let cols: Vec<Vec<i64>> = (0..snf.rank)
        .map(|i| {
            let di = snf.d[(i, i)];
            snf.u_inv.column(i).into_iter().map(|x| x * di).collect()
        })
        .collect();
    Matrix::from_columns(a.rows, &cols)
}
