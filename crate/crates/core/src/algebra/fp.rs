//! Dense linear algebra over prime fields.

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Deterministic primality test for moduli that fit in a `u32`.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero");
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i128) as u64
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// A dense matrix with entries in `F_p`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// The solution set of `Ax = b`: one particular solution plus a kernel basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = v % p;
            }
        }
        m
    }

    /// Builds a `rows x cols.len()` matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(p, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = v % p;
            }
        }
        m
    }

    pub fn from_signed_rows(p: u64, rows: &[Vec<i64>]) -> Self {
        let converted: Vec<Vec<u64>> =
            rows.iter().map(|r| r.iter().map(|&v| reduce(v, p)).collect()).collect();
        Self::from_rows(p, &converted)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.p, self.rows)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        assert_eq!(self.p, other.p, "modulus mismatch");
        let p = self.p;
        let mut out = FpMatrix::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    if b != 0 {
                        *d = (*d + a * b) % p;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let p = self.p;
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(0u64, |acc, (&a, &b)| (acc + a * b) % p)
            })
            .collect()
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum shape mismatch");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect();
        FpMatrix { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "difference shape mismatch");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + p - b) % p).collect();
        FpMatrix { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u64) -> FpMatrix {
        let p = self.p;
        let c = c % p;
        FpMatrix { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c % p).collect() }
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Kronecker product; index `(i, k)` of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &FpMatrix) -> FpMatrix {
        let p = self.p;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = FpMatrix::zeros(p, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b != 0 {
                            out.data[(i * other.rows + k) * c + j * other.cols + l] = a * b % p;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = FpMatrix::zeros(self.p, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    pub fn vstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMatrix { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diagonal(p: u64, blocks: &[FpMatrix]) -> FpMatrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = FpMatrix::zeros(p, r, c);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(ro + i, co + j, b.get(i, j));
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(r, c), p);
            for j in c..m.cols {
                let v = m.get(r, j) * inv % p;
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = (m.get(i, j) + p - f * m.get(r, j) % p) % p;
                    m.data[i * m.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : Ax = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (k, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(k);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1 % p;
            for (k, &c) in pivots.iter().enumerate() {
                v[c] = (p - r.get(k, free)) % p;
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&FpMatrix::identity(self.p, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = FpMatrix::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Solves `Ax = b`. Returns `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Result<Option<SolutionSet>, AlgebraError> {
        if b.len() != self.rows {
            return Err(AlgebraError::ShapeMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let p = self.p;
        let bcol = FpMatrix::from_columns(p, self.rows, &[b.to_vec()]);
        let (r, pivots) = self.hstack(&bcol).rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = vec![0u64; self.cols];
        for (k, &c) in pivots.iter().enumerate() {
            particular[c] = r.get(k, self.cols);
        }
        Ok(Some(SolutionSet { particular, kernel: self.kernel() }))
    }

    /// Solves `X * self = target` for `X`. Returns `None` when no solution exists.
    /// When several exist the free variables are set to zero.
    pub fn solve_left(&self, target: &FpMatrix) -> Option<FpMatrix> {
        assert_eq!(target.cols, self.cols, "solve_left shape");
        // X A = B  <=>  A^T X^T = B^T
        let at = self.transpose();
        let (r, pivots) = at.hstack(&target.transpose()).rref();
        let n = self.rows;
        if pivots.last().is_some_and(|&c| c >= n) {
            return None;
        }
        let mut x = FpMatrix::zeros(self.p, target.rows, n);
        for (k, &c) in pivots.iter().enumerate() {
            for i in 0..target.rows {
                x.set(i, c, r.get(k, n + i));
            }
        }
        Some(x)
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Restrict to a sub-block of rows and columns.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, rows.len(), cols.len());
        for (ii, i) in rows.clone().enumerate() {
            for (jj, j) in cols.clone().enumerate() {
                out.set(ii, jj, self.get(i, j));
            }
        }
        out
    }
}

pub fn solve_linear_system(a: &FpMatrix, b: &[u64]) -> Result<Option<SolutionSet>, AlgebraError> {
    a.solve(b)
}

pub fn vec_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

pub fn vec_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| (x + p - y) % p).collect()
}

pub fn vec_scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    a.iter().map(|x| x * (c % p) % p).collect()
}

pub fn unit_vector(n: usize, i: usize, p: u64) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1 % p;
    v
}

/// A subspace of `F_p^n` held in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn span(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Self {
        if vectors.is_empty() {
            return Subspace { p, ambient, basis: Vec::new() };
        }
        let (r, pivots) = FpMatrix::from_rows(p, vectors).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { p, ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        FpMatrix::from_rows(self.p, &all).rank() == self.basis.len()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_has_unique_solution() {
        let a = FpMatrix::identity(3, 2);
        let s = a.solve(&[1, 2]).unwrap().unwrap();
        assert_eq!(s.particular, vec![1, 2]);
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn zero_system_is_inconsistent() {
        let a = FpMatrix::zeros(2, 1, 1);
        assert_eq!(a.solve(&[1]).unwrap(), None);
    }

    #[test]
    fn underdetermined_system_over_f2() {
        let a = FpMatrix::from_rows(2, &[vec![1, 1], vec![0, 0]]);
        let s = a.solve(&[1, 0]).unwrap().unwrap();
        assert_eq!(s.particular, vec![1, 0]);
        assert_eq!(s.kernel, vec![vec![1, 1]]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = FpMatrix::identity(5, 2);
        assert!(matches!(a.solve(&[1]), Err(AlgebraError::ShapeMismatch { .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let a = FpMatrix::from_rows(7, &[vec![2, 3], vec![1, 4]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(FpMatrix::from_rows(7, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn inv_mod_small_primes() {
        for p in [2u64, 3, 5, 7, 11] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn kron_index_convention() {
        let a = FpMatrix::from_rows(5, &[vec![1, 2]]);
        let b = FpMatrix::from_rows(5, &[vec![3], vec![4]]);
        let k = a.kron(&b);
        assert_eq!(k.to_rows(), vec![vec![3, 1], vec![4, 3]]);
    }
}
