//! Jordan splittings over `Z_p` and the canonical local genus symbol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{inv_mod, is_prime, legendre, rat_mod, smallest_nonresidue, sqrt_mod_prime_power, valuation, valuation_rat};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;

/// One indecomposable piece of a unimodular Jordan block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum JordanComponent {
    /// `u·x²` for a canonical unit `u`.
    Scalar(i64),
    /// `xy`
    Hyperbolic,
    /// `x² + xy + y²`
    Anisotropic,
}

impl JordanComponent {
    pub fn rank(&self) -> usize {
        match self {
            JordanComponent::Scalar(_) => 1,
            _ => 2,
        }
    }

    pub fn form(&self) -> QuadraticForm {
        match self {
            JordanComponent::Scalar(u) => QuadraticForm::diagonal(&[*u]),
            JordanComponent::Hyperbolic => QuadraticForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap(),
            JordanComponent::Anisotropic => QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap(),
        }
    }
}

/// The constituent `p^exponent · Q_j` of a Jordan splitting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanBlock {
    pub exponent: u32,
    pub components: Vec<JordanComponent>,
}

impl JordanBlock {
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank()).sum()
    }

    /// The unscaled block `Q_j`.
    pub fn form(&self) -> QuadraticForm {
        self.components.iter().fold(QuadraticForm::new(0, vec![]).unwrap(), |acc, c| acc.direct_sum(&c.form()))
    }
}

/// A Jordan splitting `Q ≅ ⊕ p^j Q_j` over `Z_p`.
///
/// Blocks are exact. The witness is an integer matrix `W` modulo `p^precision`
/// with `Wᵗ H W ≡ H'` where `H'` is the Hessian of the reassembled sum and
/// `det W` is a unit.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub p: u64,
    pub blocks: Vec<JordanBlock>,
    pub precision: u32,
    n: usize,
    witness: Vec<i128>,
}

const MAX_MODULUS: i128 = 1 << 50;

impl JordanDecomposition {
    pub fn new(q: &QuadraticForm, p: u64) -> Result<Self> {
        if q.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let v = valuation(q.det_hessian(), p);
        let mut k = v + if p == 2 { 5 } else { 3 };
        // For odd p a splitting mod p^{v+1} already fixes the Z_p class.
        while p != 2 && k > v + 1 && (p as i128).checked_pow(k).map_or(true, |m| m > MAX_MODULUS) {
            k -= 1;
        }
        Self::with_precision(q, p, k)
    }

    pub fn with_precision(q: &QuadraticForm, p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if q.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let modulus = (p as i128).checked_pow(precision).filter(|&m| m <= MAX_MODULUS).ok_or(Error::Overflow("Jordan witness precision"))?;
        let n = q.dim();
        let pieces = if p == 2 { split_dyadic(q) } else { split_odd(q, p) };

        let mut located: Vec<(u32, JordanComponent, Vec<Vec<i128>>)> = Vec::new();
        for piece in pieces {
            match piece {
                Piece::Rank1 { exponent, unit, vector } => {
                    let canon = canonical_unit(&unit, p);
                    let ratio = BigRational::from_integer(canon.into()) / &unit;
                    let t = sqrt_mod_prime_power(rat_mod(&ratio, modulus), p, precision).expect("unit ratio is a square");
                    let col = vector.iter().map(|x| (rat_mod(x, modulus) * t).rem_euclid(modulus)).collect();
                    located.push((exponent, JordanComponent::Scalar(canon), vec![col]));
                }
                Piece::Rank2 { exponent, a, b, c, f1, f2 } => {
                    let (a, b, c) = (rat_mod(&a, modulus), rat_mod(&b, modulus), rat_mod(&c, modulus));
                    let anisotropic = a % 2 == 1 && c % 2 == 1;
                    let target = if anisotropic { 1 } else { 0 };
                    let (v, w) = normalize_binary(a, b, c, target, modulus);
                    let f1: Vec<i128> = f1.iter().map(|x| rat_mod(x, modulus)).collect();
                    let f2: Vec<i128> = f2.iter().map(|x| rat_mod(x, modulus)).collect();
                    let combine = |(x, y): (i128, i128)| -> Vec<i128> {
                        (0..n).map(|r| (x * f1[r] + y * f2[r]).rem_euclid(modulus)).collect()
                    };
                    let kind = if anisotropic { JordanComponent::Anisotropic } else { JordanComponent::Hyperbolic };
                    located.push((exponent, kind, vec![combine(v), combine(w)]));
                }
            }
        }
        located.sort_by_key(|(e, _, _)| *e);

        let mut blocks: Vec<JordanBlock> = Vec::new();
        let mut columns: Vec<Vec<i128>> = Vec::new();
        for (exponent, kind, cols) in located {
            match blocks.last_mut() {
                Some(b) if b.exponent == exponent => b.components.push(kind),
                _ => blocks.push(JordanBlock { exponent, components: vec![kind] }),
            }
            columns.extend(cols);
        }
        let mut witness = vec![0i128; n * n];
        for (j, col) in columns.iter().enumerate() {
            for r in 0..n {
                witness[r * n + j] = col[r];
            }
        }
        Ok(JordanDecomposition { p, blocks, precision, n, witness })
    }

    pub fn modulus(&self) -> i128 {
        (self.p as i128).pow(self.precision)
    }

    /// Witness matrix, row-major, entries reduced modulo `p^precision`.
    pub fn witness(&self) -> &[i128] {
        &self.witness
    }

    /// `⊕ p^j Q_j` as an integral form.
    pub fn reassembled(&self) -> Result<QuadraticForm> {
        let mut out = QuadraticForm::new(0, vec![])?;
        for b in &self.blocks {
            let scale = self.p.checked_pow(b.exponent).and_then(|s| i64::try_from(s).ok()).ok_or(Error::Overflow("Jordan block scale"))?;
            out = out.direct_sum(&b.form().scale(scale)?);
        }
        Ok(out)
    }

    /// Checks `Wᵗ H W ≡ H'` modulo `p^precision` and that `W` is invertible mod p.
    pub fn verify(&self, q: &QuadraticForm) -> Result<bool> {
        let n = self.n;
        if q.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q.dim() });
        }
        let m = self.modulus();
        let target = self.reassembled()?;
        let w = &self.witness;
        let mut hw = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i128;
                for k in 0..n {
                    s = (s + (q.h(i, k) as i128).rem_euclid(m) * w[k * n + j]).rem_euclid(m);
                }
                hw[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i128;
                for k in 0..n {
                    s = (s + w[k * n + i] * hw[k * n + j]).rem_euclid(m);
                }
                if s != (target.h(i, j) as i128).rem_euclid(m) {
                    return Ok(false);
                }
            }
        }
        Ok(det_mod_p(w, n, self.p as i128) != 0)
    }

    /// True when every block is built from the allowed indecomposables:
    /// scalars only for odd p; `u·x²`, `xy`, `x²+xy+y²` at 2.
    pub fn has_standard_blocks(&self) -> bool {
        self.blocks.iter().all(|b| {
            b.components.iter().all(|c| match (c, self.p) {
                (JordanComponent::Scalar(u), 2) => [1, 3, 5, 7].contains(u),
                (JordanComponent::Scalar(u), p) => *u == 1 || *u == smallest_nonresidue(p) as i64,
                (_, 2) => true,
                _ => false,
            })
        })
    }
}

enum Piece {
    Rank1 { exponent: u32, unit: BigRational, vector: Vec<BigRational> },
    /// `2^exponent (a x² + b xy + c y²)` with `b` odd.
    Rank2 { exponent: u32, a: BigRational, b: BigRational, c: BigRational, f1: Vec<BigRational>, f2: Vec<BigRational> },
}

fn gram_of(q: &QuadraticForm, basis: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let half = BigRational::new(1.into(), 2.into());
    basis.iter().map(|x| basis.iter().map(|y| q.hessian_bilinear_rat(x, y) * &half).collect()).collect()
}

fn axpy(target: &mut [BigRational], f: &BigRational, source: &[BigRational]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t += f * s;
    }
}

fn unit_basis(n: usize) -> Vec<Vec<BigRational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

fn p_power(p: u64, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(p).pow(e))
}

fn min_valuation<I: Iterator<Item = (usize, usize, i64)>>(it: I) -> Option<(usize, usize, i64)> {
    it.min_by_key(|&(_, _, v)| v)
}

fn split_odd(q: &QuadraticForm, p: u64) -> Vec<Piece> {
    let mut basis = unit_basis(q.dim());
    let mut out = Vec::new();
    while !basis.is_empty() {
        let g = gram_of(q, &basis);
        let r = basis.len();
        let vals = |diag: bool| {
            let g = &g;
            (0..r).flat_map(move |i| (0..r).map(move |j| (i, j))).filter(move |&(i, j)| (i == j) == diag && !g[i][j].is_zero()).map(move |(i, j)| (i, j, valuation_rat(&g[i][j], p)))
        };
        let best_diag = min_valuation(vals(true));
        let best_off = min_valuation(vals(false));
        let k = match (best_diag, best_off) {
            (Some((k, _, vd)), Some((_, _, vo))) if vd <= vo => k,
            (Some((k, _, _)), None) => k,
            (_, Some((i, j, _))) => {
                let bj = basis[j].clone();
                axpy(&mut basis[i], &BigRational::one(), &bj);
                continue;
            }
            (None, None) => unreachable!("degenerate remainder"),
        };
        let pivot = g[k][k].clone();
        let vk = basis.remove(k);
        let mut idx = 0;
        for j in 0..r {
            if j == k {
                continue;
            }
            let f = -(&g[k][j] / &pivot);
            axpy(&mut basis[idx], &f, &vk);
            idx += 1;
        }
        let e = valuation_rat(&pivot, p) as u32;
        out.push(Piece::Rank1 { exponent: e, unit: pivot / p_power(p, e), vector: vk });
    }
    out
}

fn split_dyadic(q: &QuadraticForm) -> Vec<Piece> {
    let mut basis = unit_basis(q.dim());
    let mut out = Vec::new();
    let two = BigRational::from_integer(2.into());
    while !basis.is_empty() {
        let g = gram_of(q, &basis);
        let r = basis.len();
        // Q(b_i) = g_ii and H(b_i, b_j) = 2 g_ij.
        let best_diag = min_valuation((0..r).filter(|&i| !g[i][i].is_zero()).map(|i| (i, i, valuation_rat(&g[i][i], 2))));
        let best_off = min_valuation(
            (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| !g[i][j].is_zero()).map(|(i, j)| (i, j, valuation_rat(&(&g[i][j] * &two), 2))),
        );
        let rank1 = match (best_diag, best_off) {
            (Some((_, _, vd)), Some((_, _, vo))) => vd < vo,
            (Some(_), None) => true,
            _ => false,
        };
        if rank1 {
            let k = best_diag.unwrap().0;
            let pivot = g[k][k].clone();
            let vk = basis.remove(k);
            let mut idx = 0;
            for j in 0..r {
                if j == k {
                    continue;
                }
                let f = -(&g[k][j] / &pivot);
                axpy(&mut basis[idx], &f, &vk);
                idx += 1;
            }
            let e = valuation_rat(&pivot, 2) as u32;
            out.push(Piece::Rank1 { exponent: e, unit: pivot / p_power(2, e), vector: vk });
            continue;
        }
        let (i, j, s) = best_off.expect("degenerate remainder");
        let (gii, gij, gjj) = (g[i][i].clone(), g[i][j].clone(), g[j][j].clone());
        let det = &gii * &gjj - &gij * &gij;
        let vi = basis[i].clone();
        let vj = basis[j].clone();
        let mut rest = Vec::with_capacity(r - 2);
        for (k, mut vk) in basis.into_iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            // Solve [[gii, gij], [gij, gjj]] (α, β) = (g_ik, g_jk).
            let alpha = (&gjj * &g[i][k] - &gij * &g[j][k]) / &det;
            let beta = (&gii * &g[j][k] - &gij * &g[i][k]) / &det;
            axpy(&mut vk, &-alpha, &vi);
            axpy(&mut vk, &-beta, &vj);
            rest.push(vk);
        }
        basis = rest;
        let scale = p_power(2, s as u32);
        out.push(Piece::Rank2 { exponent: s as u32, a: gii / &scale, b: gij * &two / &scale, c: gjj / &scale, f1: vi, f2: vj });
    }
    out
}

fn canonical_unit(u: &BigRational, p: u64) -> i64 {
    let n = u.numer() * u.denom();
    if p == 2 {
        n.mod_floor(&BigInt::from(8)).to_i64().unwrap()
    } else if legendre(&n, p) == 1 {
        1
    } else {
        smallest_nonresidue(p) as i64
    }
}

/// Finds `v, w` (coordinates in the given basis) with `Q(v) = Q(w) = t`,
/// `H(v, w) = 1` for the binary form `a x² + b xy + c y²` modulo `m = 2^K`.
fn normalize_binary(a: i128, b: i128, c: i128, t: i128, m: i128) -> ((i128, i128), (i128, i128)) {
    let md = |x: i128| x.rem_euclid(m);
    let qv = |v: (i128, i128)| md(md(a * md(v.0 * v.0)) + md(b * md(v.0 * v.1)) + md(c * md(v.1 * v.1)));
    let hv = |v: (i128, i128), w: (i128, i128)| md(md(2 * a * md(v.0 * w.0)) + md(b * md(v.0 * w.1 + v.1 * w.0)) + md(2 * c * md(v.1 * w.1)));
    let e1 = (1, 0);
    let e2 = (0, 1);
    let mut v = if t == 1 || a % 2 == 0 { e1 } else { e2 };
    for _ in 0..256 {
        let err = md(qv(v) - t);
        if err == 0 {
            break;
        }
        let f = if hv(v, e1) % 2 == 1 { e1 } else { e2 };
        let s = md(-err * inv_mod(hv(v, f), m).unwrap());
        v = (md(v.0 + s * f.0), md(v.1 + s * f.1));
    }
    debug_assert_eq!(qv(v), md(t));
    let f = if hv(v, e1) % 2 == 1 { e1 } else { e2 };
    let inv = inv_mod(hv(v, f), m).unwrap();
    let f = (md(f.0 * inv), md(f.1 * inv));
    let w = if t == 0 {
        let lambda = md(-qv(f));
        (md(f.0 + lambda * v.0), md(f.1 + lambda * v.1))
    } else {
        // w = x v + (1 - 2x) f with x² - x = (q' - 1)/(1 - 4q').
        let qf = qv(f);
        let r = md((qf - 1) * inv_mod(md(1 - 4 * qf), m).unwrap());
        let mut x = 0i128;
        for _ in 0..256 {
            let g = md(md(x * x) - x - r);
            if g == 0 {
                break;
            }
            x = md(x - g * inv_mod(md(2 * x - 1), m).unwrap());
        }
        let y = md(1 - 2 * x);
        (md(x * v.0 + y * f.0), md(x * v.1 + y * f.1))
    };
    (v, w)
}

fn det_mod_p(w: &[i128], n: usize, p: i128) -> i128 {
    let mut a: Vec<i128> = w.iter().map(|x| x.rem_euclid(p)).collect();
    let mut det = 1i128;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
            return 0;
        };
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            det = (p - det) % p;
        }
        let d = a[col * n + col];
        det = det * d % p;
        let inv = inv_mod(d, p).unwrap();
        for r in col + 1..n {
            let f = a[r * n + col] * inv % p;
            if f == 0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] = (a[r * n + c] - f * a[col * n + c]).rem_euclid(p);
            }
        }
    }
    det
}

/// One constituent `q^{ε n}` of a local genus symbol at scale `q = p^scale`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolFactor {
    pub scale: u32,
    pub rank: usize,
    pub sign: i8,
    /// Type I (odd) constituent; always false for odd p.
    pub odd: bool,
    /// Oddity mod 8; zero for odd p and for even constituents.
    pub oddity: u8,
}

/// Canonical symbol of the `Z_p`-lattice with inner product matrix `H`.
/// Two forms are `Z_p`-equivalent iff their symbols (and dimensions) agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalGenusSymbol {
    pub p: u64,
    pub factors: Vec<SymbolFactor>,
}

pub fn local_genus_symbol(q: &QuadraticForm, p: u64) -> Result<LocalGenusSymbol> {
    let jd = JordanDecomposition::new(q, p)?;
    if p != 2 {
        let factors = jd
            .blocks
            .iter()
            .map(|b| {
                let nonres = b.components.iter().filter(|c| !matches!(c, JordanComponent::Scalar(1))).count();
                SymbolFactor { scale: b.exponent, rank: b.rank(), sign: if nonres % 2 == 0 { 1 } else { -1 }, odd: false, oddity: 0 }
            })
            .collect();
        return Ok(LocalGenusSymbol { p, factors });
    }
    // Dyadic constituents of the even lattice (L, H): Q-components u·x² sit at
    // scale j+1 and are odd; the binary components sit at scale j and are even.
    let mut factors: Vec<SymbolFactor> = Vec::new();
    for b in &jd.blocks {
        for c in &b.components {
            let (scale, sign, odd, oddity) = match c {
                JordanComponent::Scalar(u) => (b.exponent + 1, if *u == 1 || *u == 7 { 1 } else { -1 }, true, *u as u8),
                JordanComponent::Hyperbolic => (b.exponent, 1, false, 0),
                JordanComponent::Anisotropic => (b.exponent, -1, false, 0),
            };
            match factors.iter_mut().find(|f| f.scale == scale) {
                Some(f) => {
                    f.rank += c.rank();
                    f.sign *= sign;
                    f.odd |= odd;
                    f.oddity = (f.oddity + oddity) % 8;
                }
                None => factors.push(SymbolFactor { scale, rank: c.rank(), sign, odd, oddity }),
            }
        }
    }
    factors.sort_by_key(|f| f.scale);
    canonicalize_dyadic(&mut factors);
    Ok(LocalGenusSymbol { p, factors })
}

/// Maximal runs of consecutive scales whose constituents are all odd.
fn compartments(s: &[SymbolFactor]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if s[i].odd {
            let mut c = vec![i];
            i += 1;
            while i < s.len() && s[i].odd && s[i].scale == s[i - 1].scale + 1 {
                c.push(i);
                i += 1;
            }
            out.push(c);
        } else {
            i += 1;
        }
    }
    out
}

/// Maximal runs with no two adjacent even constituents (missing scales count as even).
fn trains(s: &[SymbolFactor]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if s.is_empty() {
        return out;
    }
    let mut cur = vec![0];
    for i in 1..s.len() {
        let gap = s[i].scale - s[i - 1].scale;
        let both_odd = s[i].odd && s[i - 1].odd;
        let breaks = gap > 2 || (gap == 2 && !both_odd) || (gap == 1 && !s[i].odd && !s[i - 1].odd);
        if breaks {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(i);
    }
    out.push(cur);
    out
}

fn canonicalize_dyadic(s: &mut [SymbolFactor]) {
    let comps = compartments(s);
    for c in &comps {
        let total = c.iter().map(|&i| s[i].oddity as u32).sum::<u32>() % 8;
        for &i in c {
            s[i].oddity = 0;
        }
        s[c[0]].oddity = total as u8;
    }
    for t in trains(s) {
        for k in (1..t.len()).rev() {
            let i = t[k];
            if s[i].sign == -1 {
                s[i].sign = 1;
                s[i - 1].sign *= -1;
                for c in &comps {
                    if c.contains(&(i - 1)) || c.contains(&i) {
                        s[c[0]].oddity = (s[c[0]].oddity + 4) % 8;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BasisChange;

    fn check(q: &QuadraticForm, p: u64) -> JordanDecomposition {
        let jd = JordanDecomposition::new(q, p).unwrap();
        assert!(jd.verify(q).unwrap(), "witness failed for {q} at {p}: {:?}", jd.blocks);
        assert!(jd.has_standard_blocks());
        assert_eq!(jd.blocks.iter().map(|b| b.rank()).sum::<usize>(), q.dim());
        jd
    }

    #[test]
    fn spec_examples() {
        let i4 = QuadraticForm::sum_of_squares(4);
        let jd = check(&i4, 3);
        assert_eq!(jd.blocks.len(), 1);
        assert_eq!(jd.blocks[0].exponent, 0);
        assert_eq!(jd.blocks[0].rank(), 4);

        let jd = check(&QuadraticForm::diagonal(&[1, 3]), 3);
        assert_eq!(jd.blocks, vec![
            JordanBlock { exponent: 0, components: vec![JordanComponent::Scalar(1)] },
            JordanBlock { exponent: 1, components: vec![JordanComponent::Scalar(1)] },
        ]);

        let xy = QuadraticForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let jd = check(&xy, 2);
        assert_eq!(jd.blocks, vec![JordanBlock { exponent: 0, components: vec![JordanComponent::Hyperbolic] }]);
    }

    #[test]
    fn dyadic_shapes() {
        let hex = QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(check(&hex, 2).blocks[0].components, vec![JordanComponent::Anisotropic]);
        // 3x² + xy + 5y² has odd diagonal and odd cross term: anisotropic.
        let f = QuadraticForm::from_rows(vec![vec![6, 1], vec![1, 10]]).unwrap();
        assert_eq!(check(&f, 2).blocks[0].components, vec![JordanComponent::Anisotropic]);
        // 2x² + xy + 3y²: even diagonal entry, hyperbolic.
        let g = QuadraticForm::from_rows(vec![vec![4, 1], vec![1, 6]]).unwrap();
        assert_eq!(check(&g, 2).blocks[0].components, vec![JordanComponent::Hyperbolic]);
        let d = QuadraticForm::diagonal(&[3, 6, 12, 5]);
        let jd = check(&d, 2);
        assert_eq!(jd.blocks.iter().map(|b| b.exponent).collect::<Vec<_>>(), vec![0, 1, 2]);
        for p in [2, 3, 5, 7] {
            check(&QuadraticForm::from_rows(vec![vec![2, 1, 0], vec![1, 4, 3], vec![0, 3, 18]]).unwrap(), p);
        }
    }

    #[test]
    fn symbols_are_invariant() {
        let q = QuadraticForm::from_rows(vec![vec![2, 1, 0, 1], vec![1, 4, 1, 0], vec![0, 1, 6, 2], vec![1, 0, 2, 8]]).unwrap();
        let m = BasisChange::from_rows(vec![vec![1, 2, 0, 1], vec![0, 1, 3, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]).unwrap();
        let t = q.transform(&m).unwrap();
        for p in [2, 3, 5, 7, 11] {
            check(&t, p);
            assert_eq!(local_genus_symbol(&q, p).unwrap(), local_genus_symbol(&t, p).unwrap());
        }
        // <1,1> ~ <5,5> over Z_2; <1,3> has a different determinant.
        let a = local_genus_symbol(&QuadraticForm::diagonal(&[1, 1]), 2).unwrap();
        let b = local_genus_symbol(&QuadraticForm::diagonal(&[5, 5]), 2).unwrap();
        let c = local_genus_symbol(&QuadraticForm::diagonal(&[1, 3]), 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // <1,2> ~ <3,6> over Z_2; equal only after sign walking.
        let d = local_genus_symbol(&QuadraticForm::diagonal(&[1, 2]), 2).unwrap();
        let e = local_genus_symbol(&QuadraticForm::diagonal(&[3, 6]), 2).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn odd_symbol_detects_nonsquare_units() {
        let a = local_genus_symbol(&QuadraticForm::diagonal(&[1, 1]), 3).unwrap();
        let b = local_genus_symbol(&QuadraticForm::diagonal(&[1, 2]), 3).unwrap();
        let c = local_genus_symbol(&QuadraticForm::diagonal(&[2, 2]), 3).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn large_prime_in_determinant() {
        // det H = 10069 is prime and 10069^4 exceeds the witness modulus cap
        let q = QuadraticForm::from_rows(vec![vec![12, 2, -1, 2], vec![2, 10, -2, 1], vec![-1, -2, 10, 2], vec![2, 1, 2, 10]]).unwrap();
        let m = BasisChange::from_rows(vec![vec![1, 2, 0, 1], vec![0, 1, 3, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]).unwrap();
        let t = q.transform(&m).unwrap();
        check(&q, 10069);
        check(&t, 10069);
        assert_eq!(local_genus_symbol(&q, 10069).unwrap(), local_genus_symbol(&t, 10069).unwrap());
        let other = local_genus_symbol(&q.direct_sum(&QuadraticForm::diagonal(&[1])), 10069).unwrap();
        let nonsquare = local_genus_symbol(&q.direct_sum(&QuadraticForm::diagonal(&[7])), 10069).unwrap();
        assert_eq!(local_genus_symbol(&q.direct_sum(&QuadraticForm::diagonal(&[4])), 10069).unwrap(), other);
        assert_eq!((crate::arith::legendre(&7.into(), 10069), other == nonsquare), (-1, false));
    }
}
