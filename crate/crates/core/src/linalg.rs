//! Small exact linear algebra over Z and Q.
//!
//! Matrices are dense and row-major. Everything here is sized for forms in
//! a handful of variables; nothing is tuned for large dimensions.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_det(entries: &[BigInt], n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = entries.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                a.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

pub fn bareiss_det_i64(entries: &[i64], n: usize) -> BigInt {
    let big: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
    bareiss_det(&big, n)
}

/// Dense rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        RatMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigRational>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i].clone();
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

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
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

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Returns the entries as integers if all are integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.data.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigRational::zero();
            };
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                det = -det;
            }
            let p = a[k * n + k].clone();
            det *= &p;
            for r in k + 1..n {
                if a[r * n + k].is_zero() {
                    continue;
                }
                let f = &a[r * n + k] / &p;
                for c in k..n {
                    let v = &f * &a[k * n + c];
                    a[r * n + c] -= v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let piv = (k..n).find(|&r| !a[(r, k)].is_zero()).ok_or(Error::NotInvertible)?;
            if piv != k {
                for c in 0..n {
                    a.data.swap(k * n + c, piv * n + c);
                    inv.data.swap(k * n + c, piv * n + c);
                }
            }
            let p = a[(k, k)].clone();
            for c in 0..n {
                a[(k, c)] = &a[(k, c)] / &p;
                inv[(k, c)] = &inv[(k, c)] / &p;
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..n {
                    let v = &f * &a[(k, c)];
                    a[(r, c)] -= v;
                    let w = &f * &inv[(k, c)];
                    inv[(r, c)] -= w;
                }
            }
        }
        Ok(inv)
    }

    /// Congruence transform `Mᵗ A M`.
    pub fn congruence(&self, m: &RatMatrix) -> RatMatrix {
        &(&m.transpose() * self) * m
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Orthogonal diagonalization of a symmetric rational matrix by symmetric
/// Gaussian elimination. Returns the diagonal and a witness `M` (columns are
/// the new basis vectors) with `Mᵗ A M = diag`.
pub fn symmetric_diagonalize(a: &RatMatrix) -> Result<(Vec<BigRational>, RatMatrix)> {
    let n = a.rows();
    let mut g = a.clone();
    let mut basis = RatMatrix::identity(n);
    for k in 0..n {
        if g[(k, k)].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !g[(i, i)].is_zero()) {
                swap_basis(&mut g, &mut basis, k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !g[(k, j)].is_zero()) {
                // b_k <- b_k + b_j gives g_kk = 2 g_kj != 0.
                add_basis(&mut g, &mut basis, k, j, &BigRational::one());
            } else {
                return Err(Error::Degenerate);
            }
        }
        let pivot = g[(k, k)].clone();
        for j in k + 1..n {
            if g[(k, j)].is_zero() {
                continue;
            }
            let f = -(&g[(k, j)] / &pivot);
            add_basis(&mut g, &mut basis, j, k, &f);
        }
    }
    let diag = (0..n).map(|i| g[(i, i)].clone()).collect();
    Ok((diag, basis))
}

/// b_target <- b_target + f * b_source, updating the Gram matrix in place.
fn add_basis(g: &mut RatMatrix, basis: &mut RatMatrix, target: usize, source: usize, f: &BigRational) {
    let n = g.rows();
    for r in 0..n {
        let v = f * &basis[(r, source)];
        basis[(r, target)] += v;
    }
    // column then row
    for r in 0..n {
        let v = f * &g[(r, source)];
        g[(r, target)] += v;
    }
    for c in 0..n {
        let v = f * &g[(source, c)];
        g[(target, c)] += v;
    }
}

fn swap_basis(g: &mut RatMatrix, basis: &mut RatMatrix, i: usize, j: usize) {
    let n = g.rows();
    for r in 0..n {
        basis.data.swap(r * n + i, r * n + j);
        g.data.swap(r * n + i, r * n + j);
    }
    for c in 0..n {
        g.data.swap(i * n + c, j * n + c);
    }
}

/// Basis (as rows) of the Z-lattice spanned by integer generators, via row
/// Hermite normal form. The generators must span a full-rank lattice of
/// dimension `n`.
pub fn lattice_basis(generators: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = generators.to_vec();
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        // Euclid on the column among remaining rows.
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let pivot = *nonzero.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
            for &r in &nonzero {
                if r == pivot {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[pivot][col]);
                let prow = rows[pivot].clone();
                for (x, y) in rows[r].iter_mut().zip(prow.iter()) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(idx) = (0..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            let mut row = rows.swap_remove(idx);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    assert_eq!(out.len(), n, "generators do not span a full-rank lattice");
    out
}

/// LLL reduction (delta = 3/4) of a positive definite integral Gram matrix.
/// Returns a unimodular `T` (columns = new basis) such that `Tᵗ G T` is reduced.
pub fn lll_reduce(gram: &[i64], n: usize) -> Vec<i64> {
    let mut t: Vec<i64> = vec![0; n * n];
    for i in 0..n {
        t[i * n + i] = 1;
    }
    if n <= 1 {
        return t;
    }
    let g = |t: &Vec<i64>| -> Vec<i128> {
        // Tᵗ G T
        let mut gt = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc += gram[i * n + k] as i128 * t[k * n + j] as i128;
                }
                gt[i * n + j] = acc;
            }
        }
        let mut out = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc += t[k * n + i] as i128 * gt[k * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        out
    };
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    let mut guard = 0;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL did not terminate");
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt_from_gram(&g(&t), n);
            let m = &mu[k * n + j];
            if m.abs() * BigRational::from_integer(2.into()) > BigRational::one() {
                let q: i64 = m.round().to_integer().try_into().expect("LLL coefficient overflow");
                for r in 0..n {
                    t[r * n + k] -= q * t[r * n + j];
                }
            }
        }
        let gm = g(&t);
        let (mu, bstar) = gram_schmidt_from_gram(&gm, n);
        let lhs = &bstar[k];
        let m = &mu[k * n + k - 1];
        let rhs = (&delta - m * m) * &bstar[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            for r in 0..n {
                t.swap(r * n + k, r * n + k - 1);
            }
            k = std::cmp::max(k - 1, 1);
        }
    }
    t
}

fn gram_schmidt_from_gram(g: &[i128], n: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut mu = vec![BigRational::zero(); n * n];
    let mut bstar = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut v = BigRational::from_integer(g[i * n + j].into());
            for k in 0..j {
                v -= &mu[j * n + k] * &mu[i * n + k] * &bstar[k];
            }
            mu[i * n + j] = v / &bstar[j];
        }
        let mut b = BigRational::from_integer(g[i * n + i].into());
        for k in 0..i {
            b -= &mu[i * n + k] * &mu[i * n + k] * &bstar[k];
        }
        bstar[i] = b;
    }
    (mu, bstar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn bareiss_matches_rational_elimination() {
        let m = [2i64, 1, 0, 1, 2, 1, 0, 1, 2];
        assert_eq!(bareiss_det_i64(&m, 3), BigInt::from(4));
        let r = RatMatrix::from_i64(3, 3, &m);
        assert_eq!(r.det(), rat(4, 1));
        let z = [0i64, 1, 1, 0];
        assert_eq!(bareiss_det_i64(&z, 2), BigInt::from(-1));
    }

    #[test]
    fn diagonalize_hyperbolic_plane() {
        let a = RatMatrix::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]]);
        let (d, m) = symmetric_diagonalize(&a).unwrap();
        let diag = a.congruence(&m);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { d[i].clone() } else { rat(0, 1) };
                assert_eq!(diag[(i, j)], expect);
            }
        }
        assert!((&d[0] * &d[1]) < rat(0, 1));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = RatMatrix::from_i64(2, 2, &[2, 1, 1, 2]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
    }

    #[test]
    fn hnf_basis_of_index_two_sublattice() {
        let gens: Vec<Vec<BigInt>> = vec![vec![2.into(), 0.into()], vec![1.into(), 1.into()], vec![0.into(), 2.into()]];
        let b = lattice_basis(&gens, 2);
        let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
        assert_eq!(det.abs(), BigInt::from(2));
    }

    #[test]
    fn lll_shortens_skewed_basis() {
        // x^2 + y^2 written in the basis (1,0), (7,1)
        let g = [2i64, 14, 14, 100];
        let t = lll_reduce(&g, 2);
        let d = t[0] * t[3] - t[1] * t[2];
        assert_eq!(d.abs(), 1);
        // reduced Gram should be 2I
        let col = |j: usize| [t[j], t[2 + j]];
        for j in 0..2 {
            let v = col(j);
            let q = g[0] * v[0] * v[0] + 2 * g[1] * v[0] * v[1] + g[3] * v[1] * v[1];
            assert_eq!(q, 2);
        }
    }
}
