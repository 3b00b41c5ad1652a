//! Theta series: representation numbers by lattice-point enumeration,
//! modular metadata and the Eisenstein/cusp split.
//!
//! Enumeration follows Fincke–Pohst. Coordinate ranges come from a
//! floating-point LDLᵗ split of the Gram matrix, widened by a small slack;
//! every candidate is then evaluated exactly in integer arithmetic, so the
//! floats only steer the search.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{jacobi, kronecker};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::genus::{Completeness, GenusCatalog};

/// Default cap on the estimated number of lattice points visited.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 4_000_000_000;

/// `r_Q(0..=M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaPrefix {
    pub form: QuadraticForm,
    pub bound: u64,
    pub coefficients: Vec<u64>,
}

/// Weight `n/2`, level and the character `χ = (D/·)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModularMetadata {
    /// Twice the weight, i.e. `n`.
    pub weight_twice: u32,
    pub level: u64,
    pub character_discriminant: BigInt,
}

impl ModularMetadata {
    pub fn weight(&self) -> f64 {
        self.weight_twice as f64 / 2.0
    }

    /// `χ(d)` for the Kronecker character of the stored discriminant.
    pub fn character(&self, d: i64) -> i8 {
        kronecker(&self.character_discriminant, d)
    }

    /// True when `D` is a perfect square, so that `χ` is trivial on units.
    pub fn has_trivial_character(&self) -> bool {
        let d = &self.character_discriminant;
        !d.is_negative() && {
            let s = d.sqrt();
            &s * &s == *d
        }
    }
}

/// Floating LDLᵗ data: `Q(x) = Σ_i diag_i (x_i + Σ_{j>i} mu_ij x_j)²`.
struct Ldl {
    n: usize,
    diag: Vec<f64>,
    mu: Vec<f64>,
}

impl Ldl {
    fn new(q: &QuadraticForm) -> Ldl {
        let n = q.dim();
        let mut a: Vec<f64> = (0..n * n).map(|k| q.hessian()[k] as f64 / 2.0).collect();
        for i in 0..n {
            for j in i + 1..n {
                a[j * n + i] = a[i * n + j];
                a[i * n + j] /= a[i * n + i];
            }
            for k in i + 1..n {
                for l in k..n {
                    a[k * n + l] -= a[k * n + i] * a[i * n + l];
                }
            }
        }
        let diag = (0..n).map(|i| a[i * n + i]).collect();
        let mut mu = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                mu[i * n + j] = a[i * n + j];
            }
        }
        Ldl { n, diag, mu }
    }

    fn center(&self, k: usize, x: &[i64]) -> f64 {
        -(k + 1..self.n).map(|j| self.mu[k * self.n + j] * x[j] as f64).sum::<f64>()
    }

    /// `#{x : Q(x) ≤ t} ≤ Π_i (2√(t/diag_i) + 1)`.
    fn box_count(&self, t: f64) -> f64 {
        self.diag.iter().map(|d| 2.0 * (t / d).sqrt() + 1.0).product()
    }
}

/// What to do with the innermost coordinate once all others are fixed:
/// `Q(x_0) = a x_0² + b x_0 + c` for `x_0 ∈ [lo, hi]`.
trait Leaf: Send {
    fn visit(&mut self, lo: i64, hi: i64, a: i64, b: i64, c: i64, x: &mut [i64]);
}

struct Walker<'a> {
    q: &'a QuadraticForm,
    ldl: &'a Ldl,
    bound: f64,
    slack: f64,
}

impl Walker<'_> {
    fn range(&self, k: usize, remaining: f64, x: &[i64]) -> Option<(i64, i64, f64)> {
        if remaining < -self.slack {
            return None;
        }
        let c = self.ldl.center(k, x);
        let r = ((remaining.max(0.0) + self.slack) / self.ldl.diag[k]).sqrt() + 1e-9;
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        (lo <= hi).then_some((lo, hi, c))
    }

    /// Fixes coordinate `k` onward; `lin[i] = Σ_{j>k} H_ij x_j` for `i ≤ k`.
    fn walk<L: Leaf>(&self, k: usize, partial: i64, remaining: f64, lin: &mut [i64], x: &mut [i64], leaf: &mut L) {
        let Some((lo, hi, c)) = self.range(k, remaining, x) else { return };
        let bkk = self.q.h(k, k) / 2;
        if k == 0 {
            leaf.visit(lo, hi, bkk, lin[0], partial, x);
            return;
        }
        for xk in lo..=hi {
            x[k] = xk;
            let p = partial + bkk * xk * xk + lin[k] * xk;
            let t = remaining - self.ldl.diag[k] * (xk as f64 - c).powi(2);
            for i in 0..k {
                lin[i] += self.q.h(i, k) * xk;
            }
            self.walk(k - 1, p, t, lin, x, leaf);
            for i in 0..k {
                lin[i] -= self.q.h(i, k) * xk;
            }
        }
        x[k] = 0;
    }

    /// Runs the search, splitting the outermost coordinate across threads.
    fn run<L: Leaf + Clone + Sync>(&self, leaf: L, merge: impl Fn(&mut L, L) + Sync + Send) -> L {
        let n = self.q.dim();
        let x0 = vec![0i64; n];
        let top = n - 1;
        let Some((lo, hi, c)) = self.range(top, self.bound, &x0) else { return leaf };
        let btop = self.q.h(top, top) / 2;
        (lo..=hi)
            .into_par_iter()
            .fold(
                || leaf.clone(),
                |mut acc, xt| {
                    let mut x = vec![0i64; n];
                    x[top] = xt;
                    let mut lin: Vec<i64> = (0..n).map(|i| if i < top { self.q.h(i, top) * xt } else { 0 }).collect();
                    let p = btop * xt * xt;
                    if top == 0 {
                        acc.visit(xt, xt, 0, 0, p, &mut x);
                    } else {
                        let t = self.bound - self.ldl.diag[top] * (xt as f64 - c).powi(2);
                        self.walk(top - 1, p, t, &mut lin, &mut x, &mut acc);
                    }
                    acc
                },
            )
            .reduce(|| leaf.clone(), |mut a, b| {
                merge(&mut a, b);
                a
            })
    }
}

fn check_budget(q: &QuadraticForm, bound: u64, budget: u128) -> Result<()> {
    let ldl = Ldl::new(q);
    // Volume of {Q ≤ t} plus a generous boundary allowance.
    let n = q.dim() as f64;
    let det = q.det_gram().to_f64().unwrap_or(f64::INFINITY);
    let ball = std::f64::consts::PI.powf(n / 2.0) / gamma_half_integer(q.dim() as u32 + 2);
    let est = (ball * (bound as f64).powf(n / 2.0) / det.sqrt()).min(ldl.box_count(bound as f64)) * 2.0 + 1e4;
    if est > budget as f64 {
        return Err(Error::BudgetExceeded { needed: est as u128, budget });
    }
    Ok(())
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half_integer(k: u32) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut s = if k % 2 == 0 { 1.0 } else { 0.5 };
    while s < k as f64 / 2.0 {
        g *= s;
        s += 1.0;
    }
    g
}

fn walker_for(q: &QuadraticForm, bound: u64) -> Result<(Ldl, f64)> {
    q.require_positive_definite()?;
    if q.hessian().iter().any(|h| h.abs() > 1 << 20) || bound > 1 << 40 {
        return Err(Error::Overflow("enumeration range"));
    }
    let ldl = Ldl::new(q);
    let slack = 1e-7 * (bound as f64 + 1.0);
    Ok((ldl, slack))
}

#[derive(Clone)]
struct Histogram {
    counts: Vec<u64>,
}

impl Leaf for Histogram {
    fn visit(&mut self, lo: i64, hi: i64, a: i64, b: i64, c: i64, _x: &mut [i64]) {
        let m = self.counts.len() as i64 - 1;
        let mut v = a * lo * lo + b * lo + c;
        let mut step = a * (2 * lo + 1) + b;
        for _ in lo..=hi {
            if (0..=m).contains(&v) {
                self.counts[v as usize] += 1;
            }
            v += step;
            step += 2 * a;
        }
    }
}

#[derive(Clone)]
struct ShellCount {
    target: i64,
    count: u64,
}

impl Leaf for ShellCount {
    fn visit(&mut self, lo: i64, hi: i64, a: i64, b: i64, c: i64, _x: &mut [i64]) {
        if a == 0 {
            // single outermost coordinate, value fixed
            self.count += u64::from(c == self.target && lo == hi);
            return;
        }
        // a x² + b x + (c - target) = 0
        let disc = b as i128 * b as i128 - 4 * a as i128 * (c - self.target) as i128;
        if disc < 0 {
            return;
        }
        let s = disc.sqrt();
        if s * s != disc {
            return;
        }
        let roots = if s == 0 { vec![-b as i128] } else { vec![-b as i128 - s, -b as i128 + s] };
        for r in roots {
            if r % (2 * a as i128) == 0 {
                let x = (r / (2 * a as i128)) as i64;
                if (lo..=hi).contains(&x) {
                    self.count += 1;
                }
            }
        }
    }
}

#[derive(Clone)]
struct Collect {
    target: i64,
    vectors: Vec<Vec<i64>>,
}

impl Leaf for Collect {
    fn visit(&mut self, lo: i64, hi: i64, a: i64, b: i64, c: i64, x: &mut [i64]) {
        for x0 in lo..=hi {
            if a * x0 * x0 + b * x0 + c == self.target {
                let mut v = x.to_vec();
                v[0] = x0;
                self.vectors.push(v);
            }
        }
    }
}

/// `r_Q(m) = #{x ∈ Zⁿ : Q(x) = m}`.
pub fn enumerate_representations(q: &QuadraticForm, m: u64) -> Result<u64> {
    enumerate_representations_with_budget(q, m, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_representations_with_budget(q: &QuadraticForm, m: u64, budget: u128) -> Result<u64> {
    let (ldl, slack) = walker_for(q, m)?;
    check_budget(q, m, budget)?;
    let w = Walker { q, ldl: &ldl, bound: m as f64, slack };
    Ok(w.run(ShellCount { target: m as i64, count: 0 }, |a, b| a.count += b.count).count)
}

/// All `x` with `Q(x) = m`, sorted lexicographically.
pub fn representations(q: &QuadraticForm, m: u64) -> Result<Vec<Vec<i64>>> {
    let (ldl, slack) = walker_for(q, m)?;
    check_budget(q, m, DEFAULT_ENUMERATION_BUDGET)?;
    let w = Walker { q, ldl: &ldl, bound: m as f64, slack };
    let mut v = w.run(Collect { target: m as i64, vectors: vec![] }, |a, b| a.vectors.extend(b.vectors)).vectors;
    v.sort();
    Ok(v)
}

/// `r_Q(0..=M)` from a single sweep over `{x : Q(x) ≤ M}`.
pub fn theta_coefficients(q: &QuadraticForm, bound: u64) -> Result<ThetaPrefix> {
    theta_coefficients_with_budget(q, bound, DEFAULT_ENUMERATION_BUDGET)
}

pub fn theta_coefficients_with_budget(q: &QuadraticForm, bound: u64, budget: u128) -> Result<ThetaPrefix> {
    let (ldl, slack) = walker_for(q, bound)?;
    check_budget(q, bound, budget)?;
    let w = Walker { q, ldl: &ldl, bound: bound as f64, slack };
    let hist = w.run(Histogram { counts: vec![0; bound as usize + 1] }, |a, b| {
        for (x, y) in a.counts.iter_mut().zip(b.counts) {
            *x += y;
        }
    });
    Ok(ThetaPrefix { form: q.clone(), bound, coefficients: hist.counts })
}

/// Weight, level and character discriminant `(-1)^⌊n/2⌋ · D`, where `D` is
/// `det H` for even `n` and `num·den(det B)` for odd `n`; both lie in the
/// square class of `det B`.
pub fn modular_metadata(q: &QuadraticForm) -> Result<ModularMetadata> {
    q.require_positive_definite()?;
    let n = q.dim();
    let mut d = if n % 2 == 0 {
        q.det_hessian().clone()
    } else {
        let det = q.det_gram();
        det.numer() * det.denom()
    };
    if (n / 2) % 2 == 1 {
        d = -d;
    }
    Ok(ModularMetadata { weight_twice: n as u32, level: q.level()?, character_discriminant: d })
}

/// Genus-average Eisenstein coefficients `a_E(0..=M)` from a verified catalog.
pub fn eisenstein_prefix(genus: &GenusCatalog, bound: u64) -> Result<Vec<BigRational>> {
    if genus.completeness != Completeness::Verified {
        return Err(Error::IncompleteCatalog);
    }
    let mut num = vec![BigRational::zero(); bound as usize + 1];
    let mut den = BigRational::zero();
    for (rep, aut) in genus.representatives.iter().zip(&genus.aut_counts) {
        let w = BigRational::new(BigInt::one(), BigInt::from(*aut));
        let t = theta_coefficients(rep, bound)?;
        for (acc, r) in num.iter_mut().zip(&t.coefficients) {
            *acc += &w * BigRational::from_integer(BigInt::from(*r));
        }
        den += w;
    }
    Ok(num.into_iter().map(|x| x / &den).collect())
}

/// `a_C(m) = r_Q(m) - a_E(m)` for `m ≤ M`.
pub fn cusp_coefficients(q: &QuadraticForm, bound: u64, genus: &GenusCatalog) -> Result<Vec<BigRational>> {
    let eis = eisenstein_prefix(genus, bound)?;
    let theta = theta_coefficients(q, bound)?;
    Ok(theta.coefficients.iter().zip(eis).map(|(r, e)| BigRational::from_integer(BigInt::from(*r)) - e).collect())
}

/// An element `[[a, b], [c, d]]` of `SL_2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SlMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<SlMatrix> {
        if a * d - b * c != 1 {
            return Err(Error::Precondition("matrix must have determinant 1".into()));
        }
        Ok(SlMatrix { a, b, c, d })
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }
}

/// Truncated `Σ_{m ≤ M} r(m) e^{2πimz}`.
pub fn theta_value(prefix: &ThetaPrefix, z: Complex64) -> Complex64 {
    let step = (Complex64::i() * 2.0 * std::f64::consts::PI * z).exp();
    let mut power = Complex64::one();
    let mut sum = Complex64::zero();
    for &r in &prefix.coefficients {
        sum += power * r as f64;
        power *= step;
    }
    sum
}

/// Upper bound for `Σ_{m > M} r(m) e^{-2πmy}`, using `r(m) ≤ Π_i (2√(m/d_i) + 1)`.
pub fn theta_tail_bound(q: &QuadraticForm, bound: u64, y: f64) -> f64 {
    let ldl = Ldl::new(q);
    let n = q.dim() as f64;
    // Π (2√(m/d_i) + 1) ≤ K m^{n/2} for m ≥ 1
    let k: f64 = ldl.diag.iter().map(|d| 2.0 / d.sqrt() + 1.0).product();
    let m1 = bound as f64 + 1.0;
    let rho = ((m1 + 1.0) / m1).powf(n / 2.0) * (-2.0 * std::f64::consts::PI * y).exp();
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    k * m1.powf(n / 2.0) * (-2.0 * std::f64::consts::PI * y * m1).exp() / (1.0 - rho)
}

/// `(c/d)` with the sign convention of the theta multiplier.
fn theta_legendre(c: i64, d: i64) -> f64 {
    if c == 0 {
        return if d.abs() == 1 { 1.0 } else { 0.0 };
    }
    let s = jacobi(c, d.abs()) as f64;
    if c < 0 && d < 0 {
        -s
    } else {
        s
    }
}

/// The factor `j(γ, z)` with `Θ(γz) = j(γ, z) Θ(z)`.
pub fn transformation_factor(meta: &ModularMetadata, g: &SlMatrix, z: Complex64) -> Complex64 {
    let n = meta.weight_twice;
    let czd = z * g.c as f64 + g.d as f64;
    if n % 2 == 0 {
        return czd.powi(n as i32 / 2) * meta.character(g.d) as f64;
    }
    // (det/d) [ε_d^{-1} (c/d) √(cz+d)]^n
    let sign = if (n / 2) % 2 == 1 { -1 } else { 1 };
    let det = &meta.character_discriminant * BigInt::from(sign);
    let eps_inv = if g.d.rem_euclid(4) == 1 { Complex64::one() } else { -Complex64::i() };
    let base = eps_inv * theta_legendre(g.c, g.d) * czd.sqrt();
    base.powi(n as i32) * theta_legendre_big(&det, g.d)
}

fn theta_legendre_big(a: &BigInt, d: i64) -> f64 {
    let r = a.mod_floor(&BigInt::from(d.abs())).to_i64().unwrap();
    jacobi(r, d.abs()) as f64
}

/// `|Θ(γz) - j(γ,z)Θ(z)|` with both series truncated far enough that the
/// certified tails are below `tail_tol`; returns `(residual, tail_bound)`.
pub fn transformation_residual(q: &QuadraticForm, g: &SlMatrix, z: Complex64, tail_tol: f64) -> Result<(f64, f64)> {
    let meta = modular_metadata(q)?;
    if g.c % meta.level as i64 != 0 {
        return Err(Error::Precondition(format!("γ is not in Γ0({})", meta.level)));
    }
    let gz = g.act(z);
    let y = gz.im.min(z.im);
    let mut bound = 16u64;
    while theta_tail_bound(q, bound, y) > tail_tol {
        bound *= 2;
        if bound > 1 << 22 {
            return Err(Error::BudgetExceeded { needed: bound as u128, budget: 1 << 22 });
        }
    }
    let prefix = theta_coefficients(q, bound)?;
    let j = transformation_factor(&meta, g, z);
    let lhs = theta_value(&prefix, gz);
    let rhs = j * theta_value(&prefix, z);
    let tail = theta_tail_bound(q, bound, gz.im) + j.norm() * theta_tail_bound(q, bound, z.im);
    Ok(((lhs - rhs).norm(), tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex() -> QuadraticForm {
        QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn representation_examples() {
        let i4 = QuadraticForm::sum_of_squares(4);
        assert_eq!(enumerate_representations(&i4, 1).unwrap(), 8);
        assert_eq!(enumerate_representations(&i4, 0).unwrap(), 1);
        assert_eq!(enumerate_representations(&QuadraticForm::sum_of_squares(2), 5).unwrap(), 8);
        assert_eq!(representations(&QuadraticForm::sum_of_squares(2), 5).unwrap().len(), 8);
        assert_eq!(enumerate_representations(&QuadraticForm::diagonal(&[3]), 12).unwrap(), 2);
        assert!(enumerate_representations(&QuadraticForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap(), 1).is_err());
    }

    #[test]
    fn theta_examples() {
        let i4 = QuadraticForm::sum_of_squares(4);
        assert_eq!(theta_coefficients(&i4, 4).unwrap().coefficients, vec![1, 8, 24, 32, 24]);
        assert_eq!(theta_coefficients(&QuadraticForm::diagonal(&[1]), 4).unwrap().coefficients, vec![1, 2, 0, 0, 2]);
        assert_eq!(theta_coefficients(&hex(), 3).unwrap().coefficients, vec![1, 6, 0, 6]);
        assert_eq!(theta_coefficients(&i4, 10).unwrap().coefficients, vec![1, 8, 24, 32, 24, 48, 96, 64, 24, 104, 144]);
    }

    #[test]
    fn metadata_examples() {
        let m = modular_metadata(&QuadraticForm::sum_of_squares(4)).unwrap();
        assert_eq!((m.weight_twice, m.level), (4, 4));
        assert!(m.has_trivial_character());
        let m = modular_metadata(&QuadraticForm::diagonal(&[1])).unwrap();
        assert_eq!((m.weight_twice, m.level), (1, 4));
        let m = modular_metadata(&hex()).unwrap();
        assert_eq!((m.weight_twice, m.level), (2, 3));
        assert_eq!(m.character(2), kronecker(&BigInt::from(-3), 2));
        assert_eq!(m.character(2), -1);
        assert_eq!(m.character(7), 1);
    }

    #[test]
    fn transformation_law_numeric() {
        let z = Complex64::new(0.3, 1.1);
        let cases: Vec<(QuadraticForm, Vec<SlMatrix>)> = vec![
            (hex(), vec![SlMatrix::new(1, 0, 3, 1).unwrap(), SlMatrix::new(2, 1, 3, 2).unwrap(), SlMatrix::new(-1, 0, -3, -1).unwrap(), SlMatrix::new(1, 1, 6, 7).unwrap()]),
            (QuadraticForm::sum_of_squares(4), vec![SlMatrix::new(1, 0, 4, 1).unwrap(), SlMatrix::new(3, 1, 8, 3).unwrap(), SlMatrix::new(-1, 0, -4, -1).unwrap()]),
            (QuadraticForm::diagonal(&[1]), vec![SlMatrix::new(1, 0, 4, 1).unwrap(), SlMatrix::new(1, 0, 8, 1).unwrap(), SlMatrix::new(3, 1, 8, 3).unwrap(), SlMatrix::new(5, 2, 12, 5).unwrap()]),
            (QuadraticForm::diagonal(&[1, 1, 1]), vec![SlMatrix::new(3, 1, 8, 3).unwrap(), SlMatrix::new(1, 0, 4, 1).unwrap()]),
            (QuadraticForm::diagonal(&[1, 1, 3]), vec![SlMatrix::new(1, 0, 12, 1).unwrap(), SlMatrix::new(5, 2, 12, 5).unwrap(), SlMatrix::new(7, 4, 12, 7).unwrap()]),
        ];
        for (q, gammas) in cases {
            for g in gammas {
                let (res, tail) = transformation_residual(&q, &g, z, 1e-12).unwrap();
                assert!(res + tail < 1e-8, "{q} {g:?}: residual {res}, tail {tail}");
            }
        }
    }

    #[test]
    fn cusp_parts() {
        use crate::genus::genus_enumerate;
        let i4 = QuadraticForm::sum_of_squares(4);
        let c = genus_enumerate(&i4, &[3, 5]).unwrap();
        assert!(cusp_coefficients(&i4, 30, &c).unwrap().iter().all(|x| x.is_zero()));

        let q = QuadraticForm::diagonal(&[1, 1, 7]);
        let c = genus_enumerate(&q, &[3, 5]).unwrap();
        let parts: Vec<Vec<BigRational>> = c.representatives.iter().map(|r| cusp_coefficients(r, 40, &c).unwrap()).collect();
        assert!(parts.iter().all(|a| a[0].is_zero()));
        assert!(parts[0].iter().any(|x| !x.is_zero()));
        for m in 0..=40 {
            let weighted: BigRational = parts.iter().zip(&c.aut_counts).map(|(a, &w)| &a[m] / BigRational::from_integer(BigInt::from(w))).sum();
            assert!(weighted.is_zero());
        }
    }

    #[test]
    fn tail_bound_dominates() {
        let q = QuadraticForm::sum_of_squares(3);
        let full = theta_coefficients(&q, 400).unwrap();
        let y = 0.05;
        let actual: f64 = full.coefficients.iter().enumerate().skip(101).map(|(m, &r)| r as f64 * (-2.0 * std::f64::consts::PI * y * m as f64).exp()).sum();
        assert!(theta_tail_bound(&q, 100, y) >= actual);
    }
}
