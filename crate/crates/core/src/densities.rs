//! Local representation densities and Eisenstein coefficients.
//!
//! Finite densities are `#{x mod p^i : Q(x) ≡ m} / p^{(n-1)i}` at a
//! checked stabilization exponent. Counting goes through a Jordan splitting:
//! each indecomposable constituent contributes a histogram of values mod
//! `p^i`, and the histograms are convolved. All histograms are constant on
//! unit-square classes, so a convolution is evaluated only at one residue
//! per class.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{factor_bigint, is_prime, is_squarefree, legendre, prime_divisors, valuation, valuation_i128};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::genus::{same_genus, Completeness, GenusCatalog};
use crate::local::{JordanComponent, JordanDecomposition, Place};
use crate::theta::enumerate_representations;

/// Default cap on residues visited by [`count_solutions_exhaustive`].
pub const DEFAULT_COUNT_BUDGET: u128 = 50_000_000;

/// Largest modulus `p^i` for which histograms are built.
const MAX_HISTOGRAM: i128 = 1 << 24;

/// Extra exponents tried after the initial stabilization exponent.
const STABILIZATION_STEPS: u32 = 6;

/// A real number `coefficient · √radicand · π^(pi_halves/2)` with `radicand`
/// a positive squarefree integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealValue {
    pub coefficient: BigRational,
    pub radicand: BigInt,
    pub pi_halves: i64,
}

impl RealValue {
    pub fn rational(r: BigRational) -> RealValue {
        RealValue { coefficient: r, radicand: BigInt::one(), pi_halves: 0 }
    }

    /// `c·√r` for a positive rational `r`.
    pub fn with_sqrt(c: BigRational, r: &BigRational) -> RealValue {
        let (s, f) = sqrt_split(r);
        RealValue { coefficient: c * s, radicand: f, pi_halves: 0 }
    }

    pub fn times_pi_halves(mut self, halves: i64) -> RealValue {
        self.pi_halves += halves;
        self
    }

    pub fn is_rational(&self) -> bool {
        self.coefficient.is_zero() || (self.radicand.is_one() && self.pi_halves == 0)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coefficient.clone())
    }

    pub fn mul(&self, other: &RealValue) -> RealValue {
        let (s, f) = sqrt_split(&BigRational::from_integer(&self.radicand * &other.radicand));
        RealValue { coefficient: &self.coefficient * &other.coefficient * s, radicand: f, pi_halves: self.pi_halves + other.pi_halves }
    }

    pub fn to_f64(&self) -> f64 {
        self.coefficient.to_f64().unwrap_or(f64::NAN)
            * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
            * std::f64::consts::PI.powf(self.pi_halves as f64 / 2.0)
    }
}

impl fmt::Display for RealValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        if !self.radicand.is_one() {
            write!(f, "·√{}", self.radicand)?;
        }
        match self.pi_halves {
            0 => Ok(()),
            h if h % 2 == 0 => write!(f, "·π^{}", h / 2),
            h => write!(f, "·π^({h}/2)"),
        }
    }
}

/// Writes a positive rational `r` as `s²·f` with `s` rational and `f` squarefree.
fn sqrt_split(r: &BigRational) -> (BigRational, BigInt) {
    assert!(r.is_positive(), "square root of a non-positive rational");
    let n = r.numer() * r.denom();
    let mut f = BigInt::one();
    for (p, e) in factor_bigint(&n) {
        if e % 2 == 1 {
            f *= p;
        }
    }
    // r = (n / den²) and n / f is a perfect square.
    let s2 = &n / &f;
    let s = s2.sqrt();
    debug_assert_eq!(&s * &s, s2);
    (BigRational::new(s, r.denom().clone()), f)
}

/// `β_{Q,v}(m)` at a place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDensityValue {
    pub place: Place,
    pub value: RealValue,
    /// Exponent `i` at which the finite count was taken (zero at infinity).
    pub exponent: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Product,
    GenusAverage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinCoefficient {
    pub m: u64,
    pub value: RealValue,
    pub provenance: Provenance,
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn modulus_of(p: u64, i: u32) -> Result<i128> {
    (p as i128).checked_pow(i).filter(|&m| m <= MAX_HISTOGRAM).ok_or(Error::BudgetExceeded {
        needed: (p as u128).saturating_pow(i),
        budget: MAX_HISTOGRAM as u128,
    })
}

/// Brute-force `#{x ∈ (Z/p^i)^n : Q(x) ≡ m}` with incremental partial sums.
pub fn count_solutions_exhaustive(q: &QuadraticForm, m: i64, p: u64, i: u32, budget: u128) -> Result<u128> {
    require_prime(p)?;
    let n = q.dim();
    let modulus = (p as u128).checked_pow(i).ok_or(Error::Overflow("p^i"))?;
    let needed = (modulus).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if n == 0 {
        return Ok(u128::from(m.rem_euclid(modulus as i64) == 0));
    }
    let md = modulus as i64;
    let target = m.rem_euclid(md);
    let mut h: Vec<i64> = q.hessian().iter().map(|x| x.rem_euclid(md)).collect();
    // the diagonal holds Q(e_k) rather than H_kk
    for k in 0..n {
        h[k * n + k] = (q.h(k, k) / 2).rem_euclid(md);
    }
    let mut x = vec![0i64; n];
    Ok(exhaustive_rec(&h, n, md, target, 0, 0, &mut x))
}

fn exhaustive_rec(h: &[i64], n: usize, md: i64, target: i64, k: usize, partial: i64, x: &mut [i64]) -> u128 {
    // Q(x) = Σ_k x_k (H_kk/2 · x_k + Σ_{j<k} H_kj x_j)
    let lin = (0..k).fold(0i128, |s, j| s + h[k * n + j] as i128 * x[j] as i128).rem_euclid(md as i128) as i64;
    let half = h[k * n + k];
    let mut total = 0u128;
    for xk in 0..md {
        let term = ((half as i128 * xk as i128 + lin as i128) % md as i128 * xk as i128).rem_euclid(md as i128) as i64;
        let s = (partial + term) % md;
        if k + 1 == n {
            total += u128::from(s == target);
        } else {
            x[k] = xk;
            total += exhaustive_rec(h, n, md, target, k + 1, s, x);
        }
    }
    total
}

/// Square-class key of a residue modulo `p^i`.
fn class_key(a: i128, p: u64, i: u32) -> (u32, i128) {
    if a == 0 {
        return (i, 0);
    }
    let v = valuation_i128(a, p);
    let u = a / (p as i128).pow(v);
    if p == 2 {
        let bits = (i - v).min(3);
        (v, u.rem_euclid(1 << bits))
    } else {
        (v, legendre(&BigInt::from(u), p) as i128)
    }
}

struct ClassTable {
    keys: Vec<usize>,
    reps: Vec<i128>,
}

impl ClassTable {
    fn new(p: u64, i: u32, modulus: i128) -> ClassTable {
        let mut index: HashMap<(u32, i128), usize> = HashMap::new();
        let mut reps = Vec::new();
        let keys = (0..modulus)
            .map(|a| {
                let k = class_key(a, p, i);
                *index.entry(k).or_insert_with(|| {
                    reps.push(a);
                    reps.len() - 1
                })
            })
            .collect();
        ClassTable { keys, reps }
    }

    fn convolve(&self, f: &[u128], g: &[u128]) -> Vec<u128> {
        let m = f.len();
        let at_reps: Vec<u128> = self
            .reps
            .iter()
            .map(|&r| {
                let r = r as usize;
                let mut s = 0u128;
                for (b, &fb) in f.iter().enumerate() {
                    if fb != 0 {
                        s += fb * g[(r + m - b) % m];
                    }
                }
                s
            })
            .collect();
        self.keys.iter().map(|&k| at_reps[k]).collect()
    }
}

/// Histogram of `xy` modulo `p^i`.
fn hyperbolic_histogram(p: u64, i: u32, modulus: i128) -> Vec<u128> {
    let pi = p as u128;
    let unit_step = pi.pow(i) - pi.pow(i.saturating_sub(1));
    (0..modulus)
        .map(|a| {
            if i == 0 {
                1
            } else if a == 0 {
                i as u128 * unit_step + pi.pow(i)
            } else {
                (valuation_i128(a, p) as u128 + 1) * unit_step
            }
        })
        .collect()
}

/// Number of `(x, y)` modulo `2^i` with `x² + xy + y² ≡ a`.
fn anisotropic_count(a: i128, i: u32) -> u128 {
    match i {
        0 => 1,
        1 => {
            if a.rem_euclid(2) == 1 {
                3
            } else {
                1
            }
        }
        _ => {
            let a = a.rem_euclid(1 << i);
            if a % 2 == 1 {
                3 << (i - 1)
            } else if a % 4 == 0 {
                4 * anisotropic_count(a / 4, i - 2)
            } else {
                0
            }
        }
    }
}

fn component_histogram(c: &JordanComponent, exponent: u32, p: u64, i: u32) -> Result<Vec<u128>> {
    let modulus = modulus_of(p, i)?;
    let rank = c.rank() as u32;
    let pi = p as u128;
    if exponent >= i {
        let mut h = vec![0u128; modulus as usize];
        h[0] = pi.pow(i * rank);
        return Ok(h);
    }
    let ri = i - exponent;
    let sub_mod = modulus_of(p, ri)?;
    let sub: Vec<u128> = match c {
        JordanComponent::Scalar(u) => {
            let mut h = vec![0u128; sub_mod as usize];
            for x in 0..sub_mod {
                h[((*u as i128).rem_euclid(sub_mod) * (x * x % sub_mod) % sub_mod) as usize] += 1;
            }
            h
        }
        JordanComponent::Hyperbolic => hyperbolic_histogram(p, ri, sub_mod),
        JordanComponent::Anisotropic => (0..sub_mod).map(|a| anisotropic_count(a, ri)).collect(),
    };
    // p^e·c(x) ≡ a (mod p^i) needs p^e | a; each solution mod p^{i-e} has p^{e·rank} lifts.
    let pe = (p as i128).pow(exponent);
    let lifts = pi.pow(exponent * rank);
    Ok((0..modulus).map(|a| if a % pe == 0 { sub[(a / pe) as usize] * lifts } else { 0 }).collect())
}

/// Exact `#{x ∈ (Z/p^i)^n : Q(x) ≡ m}` through a Jordan splitting of `Q`.
pub fn count_solutions_mod_p_power(q: &QuadraticForm, m: i64, p: u64, i: u32) -> Result<u128> {
    require_prime(p)?;
    let n = q.dim() as u32;
    if (i as f64) * (n as f64) * (p as f64).log2() >= 126.0 {
        return Err(Error::Overflow("solution count"));
    }
    let modulus = modulus_of(p, i)?;
    let hist = value_histogram(q, p, i)?;
    Ok(hist[(m as i128).rem_euclid(modulus) as usize])
}

/// Histogram of `Q(x) mod p^i` over all `x ∈ (Z/p^i)^n`.
pub fn value_histogram(q: &QuadraticForm, p: u64, i: u32) -> Result<Vec<u128>> {
    let modulus = modulus_of(p, i)?;
    let mut acc = vec![0u128; modulus as usize];
    acc[0] = 1;
    if q.dim() == 0 {
        return Ok(acc);
    }
    let jd = JordanDecomposition::new(q, p)?;
    let table = ClassTable::new(p, i, modulus);
    for b in &jd.blocks {
        for c in &b.components {
            let h = component_histogram(c, b.exponent, p, i)?;
            acc = table.convolve(&acc, &h);
        }
    }
    Ok(acc)
}

fn density_ratio(q: &QuadraticForm, m: i64, p: u64, i: u32) -> Result<BigRational> {
    let count = count_solutions_mod_p_power(q, m, p, i)?;
    let denom = BigInt::from(p).pow((q.dim() as u32 - 1) * i);
    Ok(BigRational::new(BigInt::from(count), denom))
}

/// First exponent tried for the stabilized density: `1 + v_p(4·m·det H)`.
pub fn stabilization_start(q: &QuadraticForm, m: i64, p: u64) -> u32 {
    1 + valuation(&(BigInt::from(4) * BigInt::from(m) * q.det_hessian()), p)
}

/// `β_{Q,p}(m)` as `count / p^{(n-1)i}` at the first exponent `i ≥ i₀` where
/// two consecutive exponents give the same ratio.
pub fn local_density_p(q: &QuadraticForm, m: i64, p: u64) -> Result<LocalDensityValue> {
    require_prime(p)?;
    if m == 0 {
        return Err(Error::Precondition("finite local densities need m ≠ 0".into()));
    }
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let start = stabilization_start(q, m, p);
    let mut prev = density_ratio(q, m, p, start)?;
    // Odd p with p ∤ det H: every exponent above v_p(m) already gives the limit.
    let unimodular = p != 2 && valuation(q.det_hessian(), p) == 0;
    for i in start + 1..=start + STABILIZATION_STEPS {
        let cur = match density_ratio(q, m, p, i) {
            Ok(c) => c,
            Err(e) if e.is_budget() && unimodular => {
                return Ok(LocalDensityValue { place: Place::Prime(p), value: RealValue::rational(prev), exponent: i - 1 });
            }
            Err(e) if e.is_budget() => break,
            Err(e) => return Err(e),
        };
        if cur == prev {
            return Ok(LocalDensityValue { place: Place::Prime(p), value: RealValue::rational(cur), exponent: i - 1 });
        }
        prev = cur;
    }
    Err(Error::NotStabilized { p, max_exponent: start + STABILIZATION_STEPS })
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

/// `β_{Q,∞}(m) = π^{n/2} m^{n/2-1} / (Γ(n/2) √det B)` for positive definite `Q`.
pub fn local_density_infty(q: &QuadraticForm, m: i64) -> Result<LocalDensityValue> {
    q.require_positive_definite()?;
    if m <= 0 {
        return Err(Error::Precondition("archimedean density needs m > 0".into()));
    }
    let n = q.dim() as u64;
    let det_b = q.det_gram();
    let mm = BigRational::from_integer(m.into());
    let k = n / 2;
    let value = if n % 2 == 0 {
        // π^k m^{k-1} / ((k-1)! √det B)
        let c = pow_rat(&mm, k as i64 - 1) / BigRational::from_integer(factorial(k - 1));
        RealValue::with_sqrt(c, &(BigRational::one() / det_b)).times_pi_halves(n as i64)
    } else {
        // π^{k+1/2}/Γ(k+1/2) = π^k 4^k k!/(2k)!, and m^{k-1/2} = m^{k-1} √m
        let c = BigRational::new(BigInt::from(4).pow(k as u32) * factorial(k), factorial(2 * k)) * pow_rat(&mm, k as i64 - 1);
        RealValue::with_sqrt(c, &(mm / det_b)).times_pi_halves(2 * k as i64)
    };
    Ok(LocalDensityValue { place: Place::Infinity, value, exponent: 0 })
}

fn pow_rat(r: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// Bernoulli numbers `B_0..=B_k` (with `B_1 = -1/2`).
pub fn bernoulli_numbers(k: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k + 1);
    let mut binom_row = vec![BigInt::one()];
    for n in 0..=k {
        // binom_row holds C(n+1, j) for j = 0..=n+1.
        let mut next = vec![BigInt::one(); n + 2];
        for j in 1..=n {
            next[j] = &binom_row[j - 1] + &binom_row[j];
        }
        binom_row = next;
        if n == 0 {
            b.push(BigRational::one());
            continue;
        }
        let s = (0..n).fold(BigRational::zero(), |acc, j| acc + BigRational::from_integer(binom_row[j].clone()) * &b[j]);
        b.push(-s / BigRational::from_integer(BigInt::from(n as u64 + 1)));
    }
    b
}

/// `ζ(k) / π^k` for even `k ≥ 2`.
pub fn zeta_even_over_pi_power(k: u32) -> BigRational {
    assert!(k >= 2 && k % 2 == 0, "zeta at an even positive integer");
    let b = &bernoulli_numbers(k as usize)[k as usize];
    let sign = if (k / 2) % 2 == 1 { BigRational::one() } else { -BigRational::one() };
    sign * b * BigRational::from_integer(BigInt::from(2).pow(k - 1)) / BigRational::from_integer(factorial(k as u64))
}

fn is_four_squares(q: &QuadraticForm) -> bool {
    q == &QuadraticForm::sum_of_squares(4)
}

/// Closed-form local factors of `x²+y²+z²+w²` at a finite prime.
pub fn four_squares_density(m: u64, p: u64) -> Result<BigRational> {
    require_prime(p)?;
    if m == 0 {
        return Err(Error::Precondition("finite local densities need m ≠ 0".into()));
    }
    let pr = BigRational::from_integer(p.into());
    let one = BigRational::one();
    if p == 2 {
        return match m % 4 {
            1 | 3 => Ok(one),
            2 => Ok(BigRational::new(3.into(), 2.into())),
            _ => Err(Error::Unsupported("closed form at 2 needs 4 ∤ m".into())),
        };
    }
    let base = &one - (&pr * &pr).recip();
    match valuation(&BigInt::from(m), p) {
        0 => Ok(base),
        1 => Ok(base * (one + pr.recip())),
        _ => Err(Error::Unsupported("closed form needs p² ∤ m".into())),
    }
}

/// Combines `β_∞` and finite factors at the primes in `finite` with the
/// tail `Π_{p ∉ S} (1 - p^{-k}) = 1 / (ζ(k) Π_{p ∈ S} (1 - p^{-k}))`.
fn assemble(beta_inf: &RealValue, finite: &[(u64, BigRational)], k: u32) -> RealValue {
    let mut v = beta_inf.clone();
    let mut rat = BigRational::one();
    for (p, b) in finite {
        let pk = BigRational::from_integer(BigInt::from(*p).pow(k));
        rat = rat * b / (BigRational::one() - pk.recip());
    }
    rat /= zeta_even_over_pi_power(k);
    v.coefficient *= rat;
    v.pi_halves -= 2 * k as i64;
    v
}

/// Restricted closed-form mode: the four-squares form with `m` odd and
/// squarefree, all local factors from the explicit lemmas and `ζ(2) = π²/6`.
pub fn eisenstein_four_squares_closed_form(m: u64) -> Result<BigRational> {
    if m == 0 || m % 2 == 0 || !is_squarefree(m) {
        return Err(Error::Unsupported(format!("closed form needs odd squarefree m, got {m}")));
    }
    let mut primes = vec![2u64];
    primes.extend(prime_divisors(&BigInt::from(m)));
    let finite = primes.iter().map(|&p| Ok((p, four_squares_density(m, p)?))).collect::<Result<Vec<_>>>()?;
    let beta_inf = RealValue::rational(BigRational::from_integer(m.into())).times_pi_halves(4);
    let v = assemble(&beta_inf, &finite, 2);
    v.as_rational().ok_or(Error::Unsupported("π-powers did not cancel".into()))
}

/// `a_E(m) = Π_v β_{Q,v}(m)`.
///
/// For the four-squares form with odd squarefree `m` the restricted closed
/// form is used. Otherwise the finite factors at `p | 2m·det H` are counted
/// and the remaining primes are summed through `ζ(n/2)`, which needs
/// `n ≡ 0 mod 4` and a square `det H` (trivial character).
pub fn eisenstein_coefficient_product(q: &QuadraticForm, m: u64) -> Result<EisensteinCoefficient> {
    q.require_positive_definite()?;
    let done = |value| Ok(EisensteinCoefficient { m, value, provenance: Provenance::Product });
    if m == 0 {
        return done(RealValue::rational(BigRational::one()));
    }
    if is_four_squares(q) && m % 2 == 1 && is_squarefree(m) {
        return done(RealValue::rational(eisenstein_four_squares_closed_form(m)?));
    }
    let n = q.dim() as u32;
    let det = q.det_hessian();
    if n % 4 != 0 || !is_perfect_square(det) {
        return Err(Error::Unsupported("product formula tail needs n ≡ 0 mod 4 and trivial character".into()));
    }
    let mi = i64::try_from(m).map_err(|_| Error::Overflow("m"))?;
    let beta_inf = local_density_infty(q, mi)?.value;
    let primes = prime_divisors(&(BigInt::from(2) * BigInt::from(m) * det));
    let finite = primes.iter().map(|&p| Ok((p, local_density_p(q, mi, p)?.value.coefficient))).collect::<Result<Vec<_>>>()?;
    done(assemble(&beta_inf, &finite, n / 2))
}

fn is_perfect_square(d: &BigInt) -> bool {
    !d.is_negative() && {
        let s = d.sqrt();
        &s * &s == *d
    }
}

/// Genus average `(Σ r_{Q'}(m)/|Aut Q'|) / (Σ 1/|Aut Q'|)` over a catalog.
pub fn eisenstein_coefficient_genus_avg(q: &QuadraticForm, m: u64, genus: &GenusCatalog) -> Result<EisensteinCoefficient> {
    if genus.completeness != Completeness::Verified {
        return Err(Error::IncompleteCatalog);
    }
    match genus.representatives.get(genus.start_index) {
        Some(rep) if same_genus(q, rep)? => {}
        _ => return Err(Error::Precondition("catalog is not the genus of the form".into())),
    }
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for (rep, aut) in genus.representatives.iter().zip(&genus.aut_counts) {
        let w = BigRational::new(BigInt::one(), BigInt::from(*aut));
        num += &w * BigRational::from_integer(BigInt::from(enumerate_representations(rep, m)?));
        den += w;
    }
    Ok(EisensteinCoefficient { m, value: RealValue::rational(num / den), provenance: Provenance::GenusAverage })
}

/// Jacobi's four-squares count `8 Σ_{d | m, 4 ∤ d} d`.
pub fn jacobi_r4(m: u64) -> u64 {
    assert!(m >= 1, "jacobi_r4 needs m >= 1");
    8 * crate::arith::divisor_sum_not_div4(m)
}
