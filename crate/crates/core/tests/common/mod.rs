#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use qform::QuadraticForm;
use rand::Rng;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A random positive definite form: even diagonal dominating small off-diagonal entries.
pub fn random_definite<R: Rng>(rng: &mut R, n: usize, spread: i64) -> QuadraticForm {
    loop {
        let mut h = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..i {
                let v = rng.gen_range(-spread..=spread);
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        for i in 0..n {
            let row: i64 = (0..n).filter(|&j| j != i).map(|j| h[i * n + j].abs()).sum();
            h[i * n + i] = 2 * rng.gen_range(1..=3) + 2 * ((row + 1) / 2);
        }
        let q = QuadraticForm::new(n, h).unwrap();
        if q.is_positive_definite().unwrap() {
            return q;
        }
    }
}

/// A random non-degenerate form of any signature.
pub fn random_nondegenerate<R: Rng>(rng: &mut R, n: usize, spread: i64) -> QuadraticForm {
    loop {
        let mut h = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = if i == j { 2 * rng.gen_range(-spread..=spread) } else { rng.gen_range(-spread..=spread) };
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        let q = QuadraticForm::new(n, h).unwrap();
        if !q.is_degenerate() {
            return q;
        }
    }
}

/// Nonsingular projective zeros of `Q` over `F_p` by direct search over `F_p^n`.
pub fn brute_projective_points(q: &QuadraticForm, p: u64) -> u64 {
    let n = q.dim();
    let pi = p as i64;
    let total = (p as usize).pow(n as u32);
    let mut count = 0u64;
    let mut x = vec![0i64; n];
    for idx in 1..total {
        let mut r = idx;
        for c in x.iter_mut() {
            *c = (r % p as usize) as i64;
            r /= p as usize;
        }
        if q.evaluate(&x).unwrap().rem_euclid(pi as i128) != 0 {
            continue;
        }
        let singular = (0..n).all(|i| (0..n).map(|j| q.h(i, j) * x[j]).sum::<i64>().rem_euclid(pi) == 0);
        if !singular {
            count += 1;
        }
    }
    count / (p - 1)
}

/// `r_Q(m)` by scanning a box that contains the ellipsoid `Q(x) ≤ m`.
pub fn box_count(q: &QuadraticForm, m: u64, radius: i64) -> u64 {
    let n = q.dim();
    let side = (2 * radius + 1) as usize;
    let mut x = vec![0i64; n];
    let mut count = 0;
    for idx in 0..side.pow(n as u32) {
        let mut r = idx;
        for c in x.iter_mut() {
            *c = (r % side) as i64 - radius;
            r /= side;
        }
        if q.evaluate(&x).unwrap() == m as i128 {
            count += 1;
        }
    }
    count
}

pub mod strategies {
    use proptest::collection::vec;
    use proptest::prelude::*;
    use qform::QuadraticForm;

    fn assemble(n: usize, off: &[i64], diag: &[i64]) -> Vec<i64> {
        let mut h = vec![0i64; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..i {
                h[i * n + j] = off[k];
                h[j * n + i] = off[k];
                k += 1;
            }
        }
        for i in 0..n {
            h[i * n + i] = diag[i];
        }
        h
    }

    /// Strictly diagonally dominant even Hessians, hence positive definite.
    pub fn definite(dims: std::ops::RangeInclusive<usize>, spread: i64) -> impl Strategy<Value = QuadraticForm> {
        dims.prop_flat_map(move |n| (Just(n), vec(-spread..=spread, n * (n - 1) / 2), vec(1i64..=3, n))).prop_map(|(n, off, boost)| {
            let mut h = assemble(n, &off, &vec![0; n]);
            for i in 0..n {
                let row: i64 = (0..n).filter(|&j| j != i).map(|j| h[i * n + j].abs()).sum();
                h[i * n + i] = 2 * boost[i] + 2 * ((row + 1) / 2);
            }
            QuadraticForm::new(n, h).unwrap()
        })
    }

    /// Non-degenerate forms of any signature.
    pub fn nondegenerate(dims: std::ops::RangeInclusive<usize>, spread: i64) -> impl Strategy<Value = QuadraticForm> {
        dims.prop_flat_map(move |n| (Just(n), vec(-spread..=spread, n * (n - 1) / 2), vec(-spread..=spread, n)))
            .prop_map(|(n, off, diag)| QuadraticForm::new(n, assemble(n, &off, &diag.iter().map(|d| 2 * d).collect::<Vec<_>>())).unwrap())
            .prop_filter("degenerate", |q| !q.is_degenerate())
    }

    /// Unimodular matrices as products of elementary operations and sign flips.
    pub fn unimodular(n: usize) -> impl Strategy<Value = qform::BasisChange> {
        vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
            let mut m = vec![0i64; n * n];
            for i in 0..n {
                m[i * n + i] = 1;
            }
            for (i, j, c, flip) in ops {
                if i != j {
                    for r in 0..n {
                        m[r * n + j] += c * m[r * n + i];
                    }
                }
                if flip {
                    for r in 0..n {
                        m[r * n + i] = -m[r * n + i];
                    }
                }
            }
            qform::BasisChange::new(n, m).unwrap()
        })
    }
}
