//! Kneser p-neighbors: isotropic points mod p, lifting, and the neighbor lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{inv_mod, is_prime};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::linalg::lattice_basis;

fn hx_mod(q: &QuadraticForm, x: &[i64], p: i64) -> Vec<i64> {
    let n = q.dim();
    (0..n).map(|i| (0..n).map(|j| q.h(i, j) as i128 * x[j] as i128).sum::<i128>().rem_euclid(p as i128) as i64).collect()
}

fn check_prime(p: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    i64::try_from(p).map_err(|_| Error::Overflow("prime"))
}

fn check_scale(q: &QuadraticForm, p: i64) -> Result<()> {
    if q.hessian_scale() % p == 0 {
        return Err(Error::Precondition(format!("Hessian scale is divisible by {p}")));
    }
    Ok(())
}

/// Normalized projective points `x ∈ P^{n-1}(F_p)` (first nonzero coordinate 1)
/// with `Q(x) ≡ 0` and `Hx ≢ 0 (mod p)`.
pub fn isotropic_points_mod_p(q: &QuadraticForm, p: u64) -> Result<Vec<Vec<i64>>> {
    let pi = check_prime(p)?;
    let n = q.dim();
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let total = (p as u128).checked_pow(free as u32).filter(|&t| t <= 1 << 32).ok_or(Error::BudgetExceeded {
            needed: (p as u128).saturating_pow(free as u32),
            budget: 1 << 32,
        })?;
        let mut x = vec![0i64; n];
        x[lead] = 1;
        for idx in 0..total {
            let mut r = idx;
            for slot in x.iter_mut().skip(lead + 1) {
                *slot = (r % p as u128) as i64;
                r /= p as u128;
            }
            if q.evaluate(&x)?.rem_euclid(pi as i128) == 0 && hx_mod(q, &x, pi).iter().any(|&v| v != 0) {
                out.push(x.clone());
            }
        }
    }
    Ok(out)
}

/// Lifts a nonsingular point `x` with `Q(x) ≡ 0 (mod p)` to `w = x + p z`
/// with `p² | Q(w)`, solving `H(x, z) ≡ -Q(x)/p (mod p)` with `z` on one axis.
pub fn lift_isotropic(q: &QuadraticForm, x: &[i64], p: u64) -> Result<Vec<i64>> {
    let pi = check_prime(p)?;
    let qx = q.evaluate(x)?;
    if qx.rem_euclid(pi as i128) != 0 {
        return Err(Error::Precondition("point is not isotropic mod p".into()));
    }
    let hx = hx_mod(q, x, pi);
    let k = hx.iter().position(|&v| v != 0).ok_or_else(|| Error::Precondition("point is singular mod p".into()))?;
    let rhs = (-(qx / pi as i128)).rem_euclid(pi as i128) as i64;
    let t = (rhs as i128 * inv_mod(hx[k] as i128, pi as i128).unwrap()).rem_euclid(pi as i128) as i64;
    let mut w = x.to_vec();
    w[k] += pi * t;
    debug_assert_eq!(q.evaluate(&w)?.rem_euclid((pi * pi) as i128), 0);
    Ok(w)
}

/// The p-neighbor `L' = (1/p) w + L_{w,p,⊥}` with a basis expressed in the
/// coordinates of `L` (rows, rational).
pub fn p_neighbor_with_basis(q: &QuadraticForm, w: &[i64], p: u64) -> Result<(QuadraticForm, Vec<Vec<BigRational>>)> {
    let pi = check_prime(p)?;
    let n = q.dim();
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.len() });
    }
    check_scale(q, pi)?;
    if w.iter().all(|x| x.rem_euclid(pi) == 0) {
        return Err(Error::Precondition("w is not primitive mod p".into()));
    }
    if q.evaluate(w)?.rem_euclid((pi as i128) * (pi as i128)) != 0 {
        return Err(Error::Precondition("p² does not divide Q(w)".into()));
    }
    let hw = hx_mod(q, w, pi);
    let k = hw.iter().position(|&v| v != 0).ok_or_else(|| Error::Precondition("w is singular mod p".into()))?;
    let inv = inv_mod(hw[k] as i128, pi as i128).unwrap() as i64;
    // generators of p·L' = Z w + p L_{w,p,⊥}
    let big = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect::<Vec<_>>();
    let mut gens = vec![big(w.to_vec())];
    let mut ek = vec![0i64; n];
    ek[k] = pi * pi;
    gens.push(big(ek));
    for i in 0..n {
        if i == k {
            continue;
        }
        let c = (hw[i] as i128 * inv as i128).rem_euclid(pi as i128) as i64;
        let mut g = vec![0i64; n];
        g[i] = pi;
        g[k] = -c * pi;
        gens.push(big(g));
    }
    let rows = lattice_basis(&gens, n);
    let pr = BigInt::from(pi);
    let basis: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), pr.clone())).collect()).collect();
    let p2 = &pr * &pr;
    let mut h = vec![0i64; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut s = BigInt::zero();
            for i in 0..n {
                for j in 0..n {
                    s += &rows[a][i] * q.h(i, j) * &rows[b][j];
                }
            }
            let (quo, rem) = s.div_rem(&p2);
            if !rem.is_zero() {
                return Err(Error::Precondition("neighbor is not integral".into()));
            }
            h[a * n + b] = quo.to_i64().ok_or(Error::Overflow("neighbor Hessian"))?;
        }
    }
    Ok((QuadraticForm::new(n, h)?, basis))
}

pub fn p_neighbor(q: &QuadraticForm, w: &[i64], p: u64) -> Result<QuadraticForm> {
    Ok(p_neighbor_with_basis(q, w, p)?.0)
}

/// One neighbor per nonsingular isotropic point mod p.
pub fn all_p_neighbors(q: &QuadraticForm, p: u64) -> Result<Vec<QuadraticForm>> {
    check_scale(q, check_prime(p)?)?;
    isotropic_points_mod_p(q, p)?.iter().map(|x| p_neighbor(q, &lift_isotropic(q, x, p)?, p)).collect()
}
