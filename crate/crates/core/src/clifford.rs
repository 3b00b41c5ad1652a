//! The Clifford algebra of a rational quadratic space, reflections and
//! spinor norms.
//!
//! Elements are linear combinations of monomials `e_S = e_{s_1}⋯e_{s_k}`
//! with `s_1 < ⋯ < s_k`, keyed by the bitmask of `S`. Products are reduced
//! with `e_i e_i = Q(e_i)` and `e_j e_i = H_ij - e_i e_j`, so the basis does
//! not have to be orthogonal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::squarefree_part;
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::linalg::RatMatrix;

const MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    form: QuadraticForm,
    terms: BTreeMap<u32, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CliffordElement {
    pub fn zero(form: &QuadraticForm) -> Result<Self> {
        if form.dim() > MAX_DIM {
            return Err(Error::Unsupported(format!("Clifford algebras of dimension above {MAX_DIM}")));
        }
        Ok(CliffordElement { form: form.clone(), terms: BTreeMap::new() })
    }

    pub fn scalar(form: &QuadraticForm, c: BigRational) -> Result<Self> {
        let mut out = Self::zero(form)?;
        out.add_term(0, c);
        Ok(out)
    }

    pub fn one(form: &QuadraticForm) -> Result<Self> {
        Self::scalar(form, BigRational::one())
    }

    /// The generator `e_i` (0-based).
    pub fn generator(form: &QuadraticForm, i: usize) -> Result<Self> {
        Self::monomial(form, &[i], BigRational::one())
    }

    /// `c · e_{s_1}⋯e_{s_k}` for strictly increasing indices.
    pub fn monomial(form: &QuadraticForm, indices: &[usize], c: BigRational) -> Result<Self> {
        let mut out = Self::zero(form)?;
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= form.dim()) {
            return Err(Error::Precondition("monomial indices must be increasing and in range".into()));
        }
        out.add_term(indices.iter().fold(0, |m, &i| m | 1 << i), c);
        Ok(out)
    }

    /// `Σ v_i e_i`.
    pub fn vector(form: &QuadraticForm, v: &[BigRational]) -> Result<Self> {
        if v.len() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), found: v.len() });
        }
        let mut out = Self::zero(form)?;
        for (i, c) in v.iter().enumerate() {
            out.add_term(1 << i, c.clone());
        }
        Ok(out)
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    /// Nonzero coefficients keyed by index bitmask.
    pub fn terms(&self) -> &BTreeMap<u32, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, indices: &[usize]) -> BigRational {
        let key = indices.iter().fold(0u32, |m, &i| m | 1 << i);
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parity(&self) -> Parity {
        let even = self.terms.keys().filter(|k| k.count_ones() % 2 == 0).count();
        match (even, self.terms.len() - even) {
            (_, 0) => Parity::Even,
            (0, _) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    /// The scalar part, if the element is a scalar.
    pub fn as_scalar(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// The coordinates of a grade-one element.
    pub fn as_vector(&self) -> Option<Vec<BigRational>> {
        if self.terms.keys().any(|k| k.count_ones() != 1) {
            return None;
        }
        Some((0..self.form.dim()).map(|i| self.terms.get(&(1 << i)).cloned().unwrap_or_else(BigRational::zero)).collect())
    }

    fn add_term(&mut self, key: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn scaled(&self, c: &BigRational) -> Self {
        let mut out = CliffordElement { form: self.form.clone(), terms: BTreeMap::new() };
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// `e_S · e_k` for a monomial `S`.
    fn monomial_times_generator(&self, s: u32, k: usize) -> BTreeMap<u32, BigRational> {
        let mut out = BTreeMap::new();
        let bit = 1u32 << k;
        if s == 0 || (31 - s.leading_zeros()) < k as u32 {
            out.insert(s | bit, BigRational::one());
            return out;
        }
        let top = 31 - s.leading_zeros() as usize;
        let rest = s & !(1 << top);
        if top == k {
            let q = rat(self.form.h(k, k) / 2);
            if !q.is_zero() {
                out.insert(rest, q);
            }
            return out;
        }
        // e_S' e_top e_k = H_{top,k} e_S' - (e_S' e_k) e_top, and every index
        // of e_S' e_k is below `top`
        let h = self.form.h(top, k);
        if h != 0 {
            *out.entry(rest).or_insert_with(BigRational::zero) += rat(h);
        }
        for (key, c) in self.monomial_times_generator(rest, k) {
            *out.entry(key | (1 << top)).or_insert_with(BigRational::zero) -= c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn times_generator(&self, k: usize) -> Self {
        let mut out = CliffordElement { form: self.form.clone(), terms: BTreeMap::new() };
        for (s, c) in &self.terms {
            for (key, d) in self.monomial_times_generator(*s, k) {
                out.add_term(key, c * d);
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.form != other.form {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = CliffordElement { form: self.form.clone(), terms: BTreeMap::new() };
        for (s, c) in &other.terms {
            let mut partial = self.scaled(c);
            for k in (0..self.form.dim()).filter(|k| s & (1 << k) != 0) {
                partial = partial.times_generator(k);
            }
            for (key, v) in partial.terms {
                out.add_term(key, v);
            }
        }
        Ok(out)
    }

    /// The anti-automorphism `v_1⋯v_k ↦ v_k⋯v_1`.
    pub fn reverse(&self) -> Self {
        let mut out = CliffordElement { form: self.form.clone(), terms: BTreeMap::new() };
        for (s, c) in &self.terms {
            let mut partial = CliffordElement { form: self.form.clone(), terms: BTreeMap::from([(0, c.clone())]) };
            for k in (0..self.form.dim()).rev().filter(|k| s & (1 << k) != 0) {
                partial = partial.times_generator(k);
            }
            for (key, v) in partial.terms {
                out.add_term(key, v);
            }
        }
        out
    }

    /// `α · reverse(α)`; a scalar `Π Q(v_i)` when `α = v_1⋯v_k`.
    pub fn norm(&self) -> Self {
        self.multiply(&self.reverse()).expect("same algebra")
    }
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let idx: Vec<String> = (0..32).filter(|i| k & (1 << i) != 0).map(|i| format!("e{}", i + 1)).collect();
                if idx.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", idx.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        assert!(self.form == rhs.form, "Clifford elements of different algebras");
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        self.scaled(&-BigRational::one())
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self + &(-rhs)
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.multiply(rhs).expect("Clifford elements of different algebras")
    }
}

/// An isometry `σ` of `(Q^n, Q)` acting on column vectors: `σᵗHσ = H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalMap {
    form: QuadraticForm,
    matrix: RatMatrix,
}

impl OrthogonalMap {
    pub fn new(form: &QuadraticForm, matrix: RatMatrix) -> Result<Self> {
        let n = form.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.rows() });
        }
        if form.is_degenerate() {
            return Err(Error::Degenerate);
        }
        if form.hessian_matrix().congruence(&matrix) != form.hessian_matrix() {
            return Err(Error::NotIsometry);
        }
        Ok(OrthogonalMap { form: form.clone(), matrix })
    }

    pub fn identity(form: &QuadraticForm) -> Self {
        OrthogonalMap { form: form.clone(), matrix: RatMatrix::identity(form.dim()) }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn det(&self) -> BigRational {
        self.matrix.det()
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.matrix.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OrthogonalMap) -> Result<OrthogonalMap> {
        if self.form != other.form {
            return Err(Error::AlgebraMismatch);
        }
        Ok(OrthogonalMap { form: self.form.clone(), matrix: &self.matrix * &other.matrix })
    }
}

fn check_anisotropic(q: &QuadraticForm, v: &[BigRational]) -> Result<BigRational> {
    if v.len() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), found: v.len() });
    }
    let qv = q.evaluate_rat(v);
    if qv.is_zero() {
        return Err(Error::Isotropic);
    }
    Ok(qv)
}

/// `τ_v(w) = w - (H(v,w)/Q(v)) v`.
pub fn reflection(v: &[BigRational], q: &QuadraticForm) -> Result<OrthogonalMap> {
    let qv = check_anisotropic(q, v)?;
    let n = q.dim();
    let mut m = RatMatrix::identity(n);
    for j in 0..n {
        let mut ej = vec![BigRational::zero(); n];
        ej[j] = BigRational::one();
        let f = q.hessian_bilinear_rat(v, &ej) / &qv;
        for i in 0..n {
            m[(i, j)] -= &f * &v[i];
        }
    }
    Ok(OrthogonalMap { form: q.clone(), matrix: m })
}

fn reflect(q: &QuadraticForm, v: &[BigRational], qv: &BigRational, w: &[BigRational]) -> Vec<BigRational> {
    let f = q.hessian_bilinear_rat(v, w) / qv;
    w.iter().zip(v).map(|(a, b)| a - &f * b).collect()
}

/// Reflection vectors `v_1, …, v_k` with `σ = τ_{v_1} ∘ ⋯ ∘ τ_{v_k}` and `k ≤ 2n`.
pub fn decompose_into_reflections(sigma: &OrthogonalMap) -> Result<Vec<Vec<BigRational>>> {
    let order: Vec<usize> = (0..sigma.form.dim()).collect();
    decompose_into_reflections_ordered(sigma, &order)
}

/// As [`decompose_into_reflections`], taking the anisotropic pivots from
/// the standard basis in the given order.
pub fn decompose_into_reflections_ordered(sigma: &OrthogonalMap, order: &[usize]) -> Result<Vec<Vec<BigRational>>> {
    let q = &sigma.form;
    let n = q.dim();
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen != (0..n).collect::<Vec<_>>() {
        return Err(Error::Precondition("order must be a permutation of the coordinates".into()));
    }
    let mut cur = sigma.matrix.clone();
    let mut fixed: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..n {
        let project = |x: Vec<BigRational>| {
            fixed.iter().fold(x, |x, (f, qf)| {
                let c = q.hessian_bilinear_rat(f, &x) / (qf * rat(2));
                x.iter().zip(f).map(|(a, b)| a - &c * b).collect()
            })
        };
        let spanning: Vec<Vec<BigRational>> = order
            .iter()
            .map(|&j| {
                let mut e = vec![BigRational::zero(); n];
                e[j] = BigRational::one();
                project(e)
            })
            .collect();
        let v = spanning
            .iter()
            .find(|x| !q.evaluate_rat(x).is_zero())
            .cloned()
            .or_else(|| {
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).find_map(|(a, b)| {
                    let s: Vec<BigRational> = spanning[a].iter().zip(&spanning[b]).map(|(x, y)| x + y).collect();
                    (!q.evaluate_rat(&s).is_zero()).then_some(s)
                })
            })
            .ok_or(Error::Degenerate)?;
        let qv = q.evaluate_rat(&v);
        let w = cur.apply(&v);
        if w != v {
            let diff: Vec<BigRational> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
            let steps = if !q.evaluate_rat(&diff).is_zero() {
                vec![diff]
            } else {
                let sum: Vec<BigRational> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
                vec![sum, v.clone()]
            };
            // cur ← ρ⁻¹ ∘ cur with ρ = τ_{u_1} ∘ ⋯ ∘ τ_{u_k}
            for u in &steps {
                let qu = q.evaluate_rat(u);
                let cols: Vec<Vec<BigRational>> = (0..n).map(|j| reflect(q, u, &qu, &cur.column(j))).collect();
                cur = RatMatrix::from_columns(&cols);
            }
            out.extend(steps);
        }
        fixed.push((v, qv));
    }
    if !cur.is_identity() {
        return Err(Error::NotIsometry);
    }
    Ok(out)
}

/// Spinor norm with the decomposition it was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinorNorm {
    /// Squarefree representative of `Π Q(v_i)` in `Q^×/(Q^×)²`.
    pub value: BigInt,
    pub det: i8,
    pub reflections: Vec<Vec<BigRational>>,
}

/// `Π Q(v_i)` over a reflection decomposition, as a squarefree integer.
/// Elements of determinant `-1` are accepted and tagged by `det`.
pub fn spinor_norm(sigma: &OrthogonalMap) -> Result<SpinorNorm> {
    let reflections = decompose_into_reflections(sigma)?;
    let product = reflections.iter().fold(BigRational::one(), |acc, v| acc * sigma.form.evaluate_rat(v));
    let det = if sigma.det().is_positive() { 1 } else { -1 };
    Ok(SpinorNorm { value: squarefree_part(&product), det, reflections })
}

/// `u⁻¹ x u` computed in the algebra, with `u⁻¹ = reverse(u)/N(u)`.
pub fn conjugation_action(u: &[BigRational], x: &[BigRational], q: &QuadraticForm) -> Result<Vec<BigRational>> {
    let qu = check_anisotropic(q, u)?;
    let ue = CliffordElement::vector(q, u)?;
    let xe = CliffordElement::vector(q, x)?;
    let inv = ue.reverse().scaled(&(BigRational::one() / qu));
    let r = inv.multiply(&xe)?.multiply(&ue)?;
    r.as_vector().ok_or_else(|| Error::Precondition("conjugate is not a vector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat as q;

    fn i4() -> QuadraticForm {
        QuadraticForm::sum_of_squares(4)
    }

    fn hex() -> QuadraticForm {
        QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn multiplication_rules() {
        let f = i4();
        let e1 = CliffordElement::generator(&f, 0).unwrap();
        assert_eq!((&e1 * &e1).as_scalar(), Some(q(1, 1)));
        let h = hex();
        let a = CliffordElement::generator(&h, 0).unwrap();
        let b = CliffordElement::generator(&h, 1).unwrap();
        assert_eq!((&(&a * &b) + &(&b * &a)).as_scalar(), Some(q(1, 1)));
        let one = CliffordElement::one(&h).unwrap();
        let x = &(&a * &b) + &a;
        assert_eq!(&one * &x, x);
        assert!(a.multiply(&e1).is_err());
    }

    #[test]
    fn reversal() {
        let h = hex();
        let e12 = CliffordElement::monomial(&h, &[0, 1], q(1, 1)).unwrap();
        let expected = &CliffordElement::scalar(&h, q(1, 1)).unwrap() - &e12;
        assert_eq!(e12.reverse(), expected);
        let f = i4();
        let e123 = CliffordElement::monomial(&f, &[0, 1, 2], q(1, 1)).unwrap();
        assert_eq!(e123.reverse(), -&e123);
        assert_eq!(e123.reverse().reverse(), e123);
        let c = CliffordElement::scalar(&f, q(3, 2)).unwrap();
        assert_eq!(c.reverse(), c);
    }

    #[test]
    fn norms() {
        let f = i4();
        let v = CliffordElement::vector(&f, &ints(&[1, 2, 0, 1])).unwrap();
        assert_eq!(v.norm().as_scalar(), Some(q(6, 1)));
        let e12 = CliffordElement::monomial(&f, &[0, 1], q(1, 1)).unwrap();
        assert_eq!(e12.norm().as_scalar(), Some(q(1, 1)));
        assert_eq!(CliffordElement::scalar(&f, q(3, 1)).unwrap().norm().as_scalar(), Some(q(9, 1)));
    }

    #[test]
    fn reflections() {
        let f = i4();
        let t = reflection(&ints(&[1, 0, 0, 0]), &f).unwrap();
        assert_eq!(t.matrix(), &RatMatrix::from_i64(4, 4, &[-1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]));
        let h = hex();
        let (v, w) = (ints(&[1, 0]), ints(&[0, 1]));
        let d: Vec<BigRational> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
        let t = reflection(&d, &h).unwrap();
        assert_eq!(t.apply(&v), w);
        assert!(OrthogonalMap::new(&h, t.matrix().clone()).is_ok());
        assert_eq!(t.det(), q(-1, 1));
        let iso = QuadraticForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(reflection(&ints(&[1, 0]), &iso), Err(Error::Isotropic)));
    }

    #[test]
    fn decompositions() {
        let f = QuadraticForm::sum_of_squares(2);
        assert!(decompose_into_reflections(&OrthogonalMap::identity(&f)).unwrap().is_empty());
        let minus = OrthogonalMap::new(&f, RatMatrix::from_i64(2, 2, &[-1, 0, 0, -1])).unwrap();
        let refl = decompose_into_reflections(&minus).unwrap();
        assert_eq!(refl.len(), 2);
        let sn = spinor_norm(&minus).unwrap();
        assert_eq!((sn.value, sn.det), (BigInt::one(), 1));
        let v = ints(&[1, 2, 0, 1]);
        let t = reflection(&v, &i4()).unwrap();
        let r = decompose_into_reflections(&t).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(reflection(&r[0], &i4()).unwrap(), t);
        assert!(OrthogonalMap::new(&f, RatMatrix::from_i64(2, 2, &[1, 1, 0, 1])).is_err());
    }

    #[test]
    fn conjugation() {
        let f = i4();
        let e1 = ints(&[1, 0, 0, 0]);
        assert_eq!(conjugation_action(&e1, &e1, &f).unwrap(), e1);
        assert_eq!(conjugation_action(&e1, &ints(&[0, 1, 0, 0]), &f).unwrap(), ints(&[0, -1, 0, 0]));
        let h = hex();
        let (u, x) = (ints(&[2, -1]), ints(&[1, 3]));
        let expected: Vec<BigRational> = reflection(&u, &h).unwrap().apply(&x).into_iter().map(|c| -c).collect();
        assert_eq!(conjugation_action(&u, &x, &h).unwrap(), expected);
    }
}
