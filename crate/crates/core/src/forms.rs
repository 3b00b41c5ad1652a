//! Integer-valued quadratic forms stored through their Hessian matrix.
//!
//! A form `Q(x) = Σ_{i≤j} c_ij x_i x_j` is kept as the even symmetric matrix
//! `H` of second partial derivatives, so `Q(x) = ½ xᵗHx` and the Hessian
//! bilinear form is `H(x, y) = Q(x+y) - Q(x) - Q(y) = xᵗHy`. The half-integral
//! Gram matrix `B = H/2` is available as an exact rational matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{bareiss_det_i64, symmetric_diagonalize, RatMatrix};

#[derive(Clone)]
pub struct QuadraticForm {
    n: usize,
    hessian: Vec<i64>,
    det: BigInt,
    level: OnceLock<Option<u64>>,
    signature: OnceLock<Option<(usize, usize)>>,
}

impl PartialEq for QuadraticForm {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.hessian == other.hessian
    }
}

impl Eq for QuadraticForm {}

impl Hash for QuadraticForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.hessian.hash(state);
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm(n={}, H={:?})", self.n, self.rows())
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for ((i, j), c) in self.to_upper_coefficients() {
            if c == 0 {
                continue;
            }
            let mono = if i == j { format!("x{}^2", i + 1) } else { format!("x{}*x{}", i + 1, j + 1) };
            terms.push(if c == 1 { mono } else { format!("{c}*{mono}") });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    n: usize,
    hessian: Vec<Vec<i64>>,
}

impl Serialize for QuadraticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr { n: self.n, hessian: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FormRepr::deserialize(d)?;
        if repr.hessian.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "hessian has {} rows but n = {}",
                repr.hessian.len(),
                repr.n
            )));
        }
        QuadraticForm::from_rows(repr.hessian).map_err(serde::de::Error::custom)
    }
}

impl QuadraticForm {
    /// Builds a form from a row-major Hessian, checking symmetry and even diagonal.
    pub fn new(n: usize, hessian: Vec<i64>) -> Result<Self> {
        if hessian.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: hessian.len() });
        }
        for i in 0..n {
            if hessian[i * n + i] % 2 != 0 {
                return Err(Error::InvalidHessian(format!("odd diagonal entry at ({i},{i})")));
            }
            for j in 0..i {
                if hessian[i * n + j] != hessian[j * n + i] {
                    return Err(Error::InvalidHessian(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        let det = bareiss_det_i64(&hessian, n);
        Ok(QuadraticForm { n, hessian, det, level: OnceLock::new(), signature: OnceLock::new() })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    /// Form from polynomial coefficients `c_ij` (i ≤ j, zero-based indices).
    /// Missing coefficients are zero.
    pub fn from_upper_coefficients(n: usize, coeffs: &BTreeMap<(usize, usize), i64>) -> Result<Self> {
        let mut h = vec![0i64; n * n];
        for (&(i, j), &c) in coeffs {
            if i > j || j >= n {
                return Err(Error::DimensionMismatch { expected: n, found: j.max(i) + 1 });
            }
            if i == j {
                h[i * n + i] = 2 * c;
            } else {
                h[i * n + j] = c;
                h[j * n + i] = c;
            }
        }
        Self::new(n, h)
    }

    pub fn to_upper_coefficients(&self) -> BTreeMap<(usize, usize), i64> {
        let mut out = BTreeMap::new();
        for i in 0..self.n {
            for j in i..self.n {
                let c = if i == j { self.h(i, i) / 2 } else { self.h(i, j) };
                out.insert((i, j), c);
            }
        }
        out
    }

    /// `Σ a_i x_i²`.
    pub fn diagonal(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        let mut h = vec![0; n * n];
        for (i, &a) in coeffs.iter().enumerate() {
            h[i * n + i] = 2 * a;
        }
        Self::new(n, h).expect("diagonal Hessian is always valid")
    }

    /// Sum of `n` squares.
    pub fn sum_of_squares(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> i64 {
        self.hessian[i * self.n + j]
    }

    pub fn hessian(&self) -> &[i64] {
        &self.hessian
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.hessian.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn hessian_matrix(&self) -> RatMatrix {
        RatMatrix::from_i64(self.n, self.n, &self.hessian)
    }

    /// Gram matrix `B = H/2` as exact rationals.
    pub fn gram(&self) -> RatMatrix {
        self.hessian_matrix().scale(&BigRational::new(1.into(), 2.into()))
    }

    pub fn det_hessian(&self) -> &BigInt {
        &self.det
    }

    /// `det(B) = det(H) / 2^n`.
    pub fn det_gram(&self) -> BigRational {
        BigRational::new(self.det.clone(), BigInt::from(2).pow(self.n as u32))
    }

    pub fn is_degenerate(&self) -> bool {
        self.det.is_zero()
    }

    /// gcd of the Hessian entries, i.e. the generator of the Hessian scale ideal.
    pub fn hessian_scale(&self) -> i64 {
        self.hessian.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    /// `Q(x) = ½ xᵗHx`.
    pub fn evaluate(&self, x: &[i64]) -> Result<i128> {
        self.check_len(x.len())?;
        let mut acc: i128 = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            acc += (self.h(i, i) as i128 / 2) * xi * xi;
            for j in i + 1..self.n {
                acc += self.h(i, j) as i128 * xi * x[j] as i128;
            }
        }
        Ok(acc)
    }

    /// `H(x, y) = xᵗHy`.
    pub fn hessian_bilinear(&self, x: &[i64], y: &[i64]) -> Result<i128> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut acc: i128 = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..self.n {
                row += self.h(i, j) as i128 * y[j] as i128;
            }
            acc += x[i] as i128 * row;
        }
        Ok(acc)
    }

    /// `Q(x)` for a rational vector.
    pub fn evaluate_rat(&self, x: &[BigRational]) -> BigRational {
        let hb = self.hessian_bilinear_rat(x, x);
        hb / BigRational::from_integer(2.into())
    }

    pub fn hessian_bilinear_rat(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let mut acc = BigRational::zero();
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                let hij = self.h(i, j);
                if hij != 0 && !y[j].is_zero() {
                    acc += &x[i] * &y[j] * BigRational::from_integer(hij.into());
                }
            }
        }
        acc
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: len });
        }
        Ok(())
    }

    /// The form `x ↦ Q(Mx)`, whose Hessian is `MᵗHM`.
    pub fn transform(&self, m: &BasisChange) -> Result<QuadraticForm> {
        self.check_len(m.n)?;
        let n = self.n;
        let mut hm = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc += self.h(i, k) as i128 * m.get(k, j) as i128;
                }
                hm[i * n + j] = acc;
            }
        }
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc = acc
                        .checked_add((m.get(k, i) as i128).checked_mul(hm[k * n + j]).ok_or(Error::Overflow("transform"))?)
                        .ok_or(Error::Overflow("transform"))?;
                }
                out[i * n + j] = acc.try_into().map_err(|_| Error::Overflow("transform"))?;
            }
        }
        QuadraticForm::new(n, out)
    }

    /// Orthogonal direct sum `Q1 ⊕ Q2`.
    pub fn direct_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let n = self.n + other.n;
        let mut h = vec![0i64; n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                h[i * n + j] = self.h(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                h[(self.n + i) * n + self.n + j] = other.h(i, j);
            }
        }
        QuadraticForm::new(n, h).expect("direct sum of valid forms is valid")
    }

    /// The scaled form `a·Q`.
    pub fn scale(&self, a: i64) -> Result<QuadraticForm> {
        if a == 0 {
            return Err(Error::ZeroScale);
        }
        let h = self
            .hessian
            .iter()
            .map(|&x| x.checked_mul(a).ok_or(Error::Overflow("scale")))
            .collect::<Result<Vec<_>>>()?;
        QuadraticForm::new(self.n, h)
    }

    /// Smallest `N > 0` with `N·H⁻¹` integral with even diagonal.
    pub fn level(&self) -> Result<u64> {
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let cached = self.level.get_or_init(|| {
            let inv = self.hessian_matrix().inverse().ok()?;
            let mut lcm = BigInt::one();
            let half = BigRational::new(1.into(), 2.into());
            for i in 0..self.n {
                for j in 0..self.n {
                    let e = if i == j { &inv[(i, j)] * &half } else { inv[(i, j)].clone() };
                    lcm = lcm.lcm(e.denom());
                }
            }
            lcm.to_u64()
        });
        cached.ok_or(Error::Overflow("level"))
    }

    /// Signature `(p, n - p)`, the number of positive and negative squares in
    /// a rational diagonalization.
    pub fn signature(&self) -> Result<(usize, usize)> {
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let sig = self.signature.get_or_init(|| {
            let (diag, _) = symmetric_diagonalize(&self.gram()).ok()?;
            let pos = diag.iter().filter(|d| d.is_positive()).count();
            Some((pos, self.n - pos))
        });
        sig.ok_or(Error::Degenerate)
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.signature()?.0 == self.n)
    }

    pub(crate) fn require_positive_definite(&self) -> Result<()> {
        if self.n == 0 || self.is_degenerate() || !self.is_positive_definite()? {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }
}

/// An invertible integer change of variables `x ↦ Mx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisChange {
    n: usize,
    matrix: Vec<i64>,
    det: BigInt,
}

impl BasisChange {
    pub fn new(n: usize, matrix: Vec<i64>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: matrix.len() });
        }
        let det = bareiss_det_i64(&matrix, n);
        if det.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(BasisChange { n, matrix, det })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let n = cols.len();
        let mut m = vec![0; n * n];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.len() });
            }
            for i in 0..n {
                m[i * n + j] = c[i];
            }
        }
        Self::new(n, m)
    }

    /// A basis change that must be invertible over Z.
    pub fn unimodular(n: usize, matrix: Vec<i64>) -> Result<Self> {
        let m = Self::new(n, matrix)?;
        if !m.is_unimodular() {
            return Err(Error::NotInvertible);
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        BasisChange { n, matrix: m, det: BigInt::one() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.matrix[i * self.n + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.matrix
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &BasisChange) -> Result<BasisChange> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let n = self.n;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                m[i * n + j] = acc.try_into().map_err(|_| Error::Overflow("compose"))?;
            }
        }
        BasisChange::new(n, m)
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_i64(self.n, self.n, &self.matrix)
    }
}
