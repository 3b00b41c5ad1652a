//! Integer and rational helpers: primality, factorization, valuations,
//! squarefree parts, quadratic residue symbols and modular square roots.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of a positive 64-bit integer, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut rest = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            rest.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    rest.sort_unstable();
    for p in rest {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// Prime factorization of |n| for a nonzero big integer. Panics if some
/// prime factor exceeds 64 bits after trial division (never hit by the
/// determinant sizes this crate deals with).
pub fn factor_bigint(n: &BigInt) -> Vec<(u64, u32)> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut m = n.abs();
    if let Some(small) = m.to_u64() {
        return factor_u64(small);
    }
    let mut out = Vec::new();
    for p in primes_up_to(1 << 20) {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        if let Some(small) = m.to_u64() {
            for (q, f) in factor_u64(small) {
                match out.iter_mut().find(|(r, _)| *r == q) {
                    Some(entry) => entry.1 += f,
                    None => out.push((q, f)),
                }
            }
            out.sort_unstable();
            return out;
        }
    }
    panic!("integer {n} has a prime factor beyond the supported range");
}

/// Distinct primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factor_bigint(n).into_iter().map(|(p, _)| p).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_i128(n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut m = n;
    let mut v = 0;
    while m % p as i128 == 0 {
        m /= p as i128;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rat(r: &BigRational, p: u64) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

/// Splits a nonzero rational as `p^v * u` and returns `(v, u)` with u a p-adic unit.
pub fn split_p_part(r: &BigRational, p: u64) -> (i64, BigRational) {
    let v = valuation_rat(r, p);
    let pp = BigInt::from(p).pow(v.unsigned_abs() as u32);
    let u = if v >= 0 {
        r / BigRational::from_integer(pp)
    } else {
        r * BigRational::from_integer(pp)
    };
    (v, u)
}

/// Squarefree representative of the square class of a nonzero rational:
/// sign times the product of primes occurring to an odd power.
pub fn squarefree_part(r: &BigRational) -> BigInt {
    assert!(!r.is_zero(), "square class of zero");
    let n = r.numer() * r.denom();
    let mut out = BigInt::one();
    for (p, e) in factor_bigint(&n) {
        if e % 2 == 1 {
            out *= p;
        }
    }
    if n.sign() == Sign::Minus {
        -out
    } else {
        out
    }
}

/// True if a nonzero rational is a square in Q.
pub fn is_rational_square(r: &BigRational) -> bool {
    squarefree_part(r).is_one()
}

/// Legendre symbol (a / p) for an odd prime p; zero when p divides a.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol (a / n) for odd positive n.
pub fn jacobi(a: i64, n: i64) -> i8 {
    assert!(n > 0 && n % 2 == 1, "Jacobi symbol needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a / n) for any integer n, with the usual conventions
/// at n = 0, -1 and 2.
pub fn kronecker(a: &BigInt, n: i64) -> i8 {
    if n == 0 {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1i8;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    while n % 2 == 0 {
        n /= 2;
        let r = a.mod_floor(&BigInt::from(8)).to_i64().unwrap();
        match r {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    if n == 1 {
        return result;
    }
    let a_mod = a.mod_floor(&BigInt::from(n)).to_i64().unwrap();
    result * jacobi(a_mod, n)
}

/// Modular inverse of `a` modulo `m` (m >= 1), if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let g = a.rem_euclid(m).extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

/// Reduces a p-integral rational to an integer modulo `modulus` (a power of p).
pub fn rat_mod(r: &BigRational, modulus: i128) -> i128 {
    let m = BigInt::from(modulus);
    let num = r.numer().mod_floor(&m).to_i128().unwrap();
    let den = r.denom().mod_floor(&m).to_i128().unwrap();
    let inv = inv_mod(den, modulus).expect("denominator must be a unit modulo the prime power");
    (num * inv).rem_euclid(modulus)
}

/// Square root of a unit `a` modulo `p^k`, when one exists.
pub fn sqrt_mod_prime_power(a: i128, p: u64, k: u32) -> Option<i128> {
    let pk = (p as i128).pow(k);
    let a = a.rem_euclid(pk);
    if p == 2 {
        // Unit squares modulo 2^k are exactly the residues 1 mod 8 (k >= 3).
        let low = match k {
            0 => return Some(0),
            1 => 1,
            2 => 4,
            _ => 8,
        };
        if a % 2 == 0 || a % low != 1 % low {
            return None;
        }
        if k <= 3 {
            return Some(1);
        }
        let mut s: i128 = 1;
        for j in 3..k {
            // s^2 = a mod 2^j; fix the next bit.
            let m = 1i128 << (j + 1);
            if (s * s - a).rem_euclid(m) != 0 {
                s += 1i128 << (j - 1);
            }
        }
        return Some(s.rem_euclid(pk));
    }
    let pi = p as i128;
    let a0 = a.rem_euclid(pi);
    if a0 == 0 {
        return None;
    }
    let root = (0..pi).find(|&x| (x * x - a0).rem_euclid(pi) == 0)?;
    // Hensel: s <- s - (s^2 - a) / (2s)
    let mut s = root;
    let mut m = pi;
    for _ in 1..k {
        m *= pi;
        let f = (s * s - a).rem_euclid(m);
        let inv = inv_mod(2 * s, m).unwrap();
        s = (s - f * inv).rem_euclid(m);
    }
    Some(s.rem_euclid(pk))
}

/// Smallest quadratic non-residue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(&BigInt::from(a), p) == -1).unwrap()
}

/// Sum of divisors d of m with 4 not dividing d.
pub fn divisor_sum_not_div4(m: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            let e = m / d;
            if d % 4 != 0 {
                s += d;
            }
            if e != d && e % 4 != 0 {
                s += e;
            }
        }
        d += 1;
    }
    s
}

/// True for squarefree positive integers.
pub fn is_squarefree(m: u64) -> bool {
    m > 0 && factor_u64(m).iter().all(|&(_, e)| e == 1)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}
