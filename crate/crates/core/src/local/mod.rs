//! Local invariants of rational quadratic forms.
//!
//! Square classes of `Q_v^×`, Hilbert symbols, Hasse invariants and the
//! resulting classification of forms over `R`, `Q_p` and `Q`. The Hasse
//! invariant uses the convention `c = Π_{i<j} (a_i, a_j)_p` over any
//! diagonalization `Σ a_i x_i²`.

mod jordan;

pub use jordan::{local_genus_symbol, JordanBlock, JordanComponent, JordanDecomposition, LocalGenusSymbol, SymbolFactor};

/// Jordan splitting of `Q` over `Z_p` at the default working precision.
pub fn jordan_decompose(q: &QuadraticForm, p: u64) -> Result<JordanDecomposition> {
    JordanDecomposition::new(q, p)
}

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, legendre, prime_divisors, smallest_nonresidue, split_p_part, squarefree_part};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::linalg::{symmetric_diagonalize, RatMatrix};

/// A place of Q: the real place or a finite prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            other => {
                let p: u64 = other.parse().map_err(|_| Error::Precondition(format!("bad place `{other}`")))?;
                Place::prime(p)
            }
        }
    }
}

/// An element of `Q_v^× / (Q_v^×)²`.
///
/// The unit part is a canonical representative: `±1` at infinity, `1` or
/// the smallest quadratic non-residue for odd `p`, and one of `1, 3, 5, 7`
/// at `p = 2`. At infinity the valuation parity is always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SquareClass {
    #[serde(skip)]
    pub place: Place,
    pub odd_valuation: bool,
    pub unit: i64,
}

impl SquareClass {
    pub fn of(r: &BigRational, place: Place) -> Result<SquareClass> {
        if r.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(match place {
            Place::Infinity => SquareClass { place, odd_valuation: false, unit: if r.is_positive() { 1 } else { -1 } },
            Place::Prime(p) => {
                let (v, u) = split_p_part(r, p);
                let unit = unit_class(&u, p);
                SquareClass { place, odd_valuation: v.rem_euclid(2) == 1, unit }
            }
        })
    }

    pub fn of_int(n: i64, place: Place) -> Result<SquareClass> {
        Self::of(&BigRational::from_integer(n.into()), place)
    }

    pub fn one(place: Place) -> SquareClass {
        SquareClass { place, odd_valuation: false, unit: 1 }
    }

    /// A rational number in this class.
    pub fn representative(&self) -> BigRational {
        let mut r = BigRational::from_integer(self.unit.into());
        if let (Place::Prime(p), true) = (self.place, self.odd_valuation) {
            r *= BigRational::from_integer(p.into());
        }
        r
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        assert_eq!(self.place, other.place, "square classes at different places");
        Self::of(&(self.representative() * other.representative()), self.place).unwrap()
    }

    pub fn is_trivial(&self) -> bool {
        !self.odd_valuation && self.unit == 1
    }

    /// Every square class at a place: 2 at infinity, 4 for odd p, 8 at 2.
    pub fn all(place: Place) -> Vec<SquareClass> {
        let units: Vec<i64> = match place {
            Place::Infinity => return vec![Self::one(place), SquareClass { place, odd_valuation: false, unit: -1 }],
            Place::Prime(2) => vec![1, 3, 5, 7],
            Place::Prime(p) => vec![1, smallest_nonresidue(p) as i64],
        };
        [false, true]
            .into_iter()
            .flat_map(|odd| units.iter().map(move |&unit| SquareClass { place, odd_valuation: odd, unit }))
            .collect()
    }
}

/// Canonical representative of the square class of a p-adic unit rational.
fn unit_class(u: &BigRational, p: u64) -> i64 {
    let n = u.numer() * u.denom();
    if p == 2 {
        n.mod_floor(&BigInt::from(8)).to_i64().unwrap()
    } else if legendre(&n, p) == 1 {
        1
    } else {
        smallest_nonresidue(p) as i64
    }
}

/// Hilbert symbol `(a, b)_v` of two nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_p_part(a, p);
            let (beta, v) = split_p_part(b, p);
            let u = u.numer() * u.denom();
            let v = v.numer() * v.denom();
            if p == 2 {
                let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
                let (u, v) = (m8(&u), m8(&v));
                let eps = |x: i64| ((x - 1) / 2) % 2;
                let omega = |x: i64| ((x * x - 1) / 8) % 2;
                let e = eps(u) * eps(v) + alpha.rem_euclid(2) * omega(v) + beta.rem_euclid(2) * omega(u);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let mut s: i8 = 1;
                if (alpha * beta).rem_euclid(2) == 1 && p % 4 == 3 {
                    s = -s;
                }
                if beta.rem_euclid(2) == 1 {
                    s *= legendre(&u, p);
                }
                if alpha.rem_euclid(2) == 1 {
                    s *= legendre(&v, p);
                }
                s
            }
        }
    })
}

pub fn hilbert_symbol_int(a: i64, b: i64, place: Place) -> Result<i8> {
    hilbert_symbol(&BigRational::from_integer(a.into()), &BigRational::from_integer(b.into()), place)
}

/// A rational diagonalization `Mᵗ B M = diag(a_1, …, a_n)` of the Gram matrix.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub entries: Vec<BigRational>,
    /// Columns are the new (orthogonal) basis vectors.
    pub witness: RatMatrix,
}

/// Diagonalizes `Q` over Q: `Q(Mx) = Σ a_i x_i²`.
pub fn diagonalize_over_q(q: &QuadraticForm) -> Result<Diagonalization> {
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let (entries, witness) = symmetric_diagonalize(&q.gram())?;
    Ok(Diagonalization { entries, witness })
}

fn hasse_of_entries(entries: &[BigRational], place: Place) -> i8 {
    let mut c = 1;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            c *= hilbert_symbol(&entries[i], &entries[j], place).unwrap();
        }
    }
    c
}

/// Hasse invariant `Π_{i<j} (a_i, a_j)_v`.
pub fn hasse_invariant(q: &QuadraticForm, place: Place) -> Result<i8> {
    let d = diagonalize_over_q(q)?;
    Ok(hasse_of_entries(&d.entries, place))
}

/// The complete set of invariants of a form over `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QpInvariants {
    pub n: usize,
    pub det_class: SquareClass,
    pub hasse: i8,
}

pub fn qp_invariants(q: &QuadraticForm, place: Place) -> Result<QpInvariants> {
    if q.dim() == 0 {
        return Ok(QpInvariants { n: 0, det_class: SquareClass::one(place), hasse: 1 });
    }
    let d = diagonalize_over_q(q)?;
    let det: BigRational = d.entries.iter().fold(BigRational::one(), |acc, x| acc * x);
    Ok(QpInvariants { n: q.dim(), det_class: SquareClass::of(&det, place)?, hasse: hasse_of_entries(&d.entries, place) })
}

pub fn isometric_over_qp(q1: &QuadraticForm, q2: &QuadraticForm, place: Place) -> Result<bool> {
    if let Place::Infinity = place {
        return isometric_over_r(q1, q2);
    }
    if q1.is_degenerate() || q2.is_degenerate() {
        return Err(Error::Degenerate);
    }
    Ok(qp_invariants(q1, place)? == qp_invariants(q2, place)?)
}

pub fn isometric_over_r(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    Ok(q1.dim() == q2.dim() && q1.signature()? == q2.signature()?)
}

/// Places at which two forms must be compared for rational equivalence:
/// infinity, 2 and the odd primes dividing either determinant.
pub fn relevant_places(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<Vec<Place>> {
    if q1.is_degenerate() || q2.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let prod = q1.det_hessian() * q2.det_hessian() * BigInt::from(2);
    let mut places = vec![Place::Infinity];
    places.extend(prime_divisors(&prod).into_iter().map(Place::Prime));
    Ok(places)
}

/// Rational equivalence via Hasse-Minkowski, checked at the finitely many
/// places where the two forms can differ.
pub fn isometric_over_q(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    let places = relevant_places(q1, q2)?;
    if q1.dim() != q2.dim() {
        return Ok(false);
    }
    if squarefree_part(&q1.det_gram()) != squarefree_part(&q2.det_gram()) {
        return Ok(false);
    }
    for place in places {
        if !isometric_over_qp(q1, q2, place)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `Q` has a nontrivial zero over `Q_p` (or over R for the real place).
pub fn is_isotropic_over_qp(q: &QuadraticForm, place: Place) -> Result<bool> {
    if q.is_degenerate() {
        return Err(Error::Degenerate);
    }
    if let Place::Infinity = place {
        let (pos, neg) = q.signature()?;
        return Ok(pos > 0 && neg > 0);
    }
    let inv = qp_invariants(q, place)?;
    let minus_one = BigRational::from_integer((-1).into());
    let d = inv.det_class.representative();
    Ok(match inv.n {
        0 | 1 => false,
        2 => SquareClass::of(&-d, place)?.is_trivial(),
        3 => inv.hasse == hilbert_symbol(&minus_one, &-d, place)?,
        4 => !inv.det_class.is_trivial() || inv.hasse == hilbert_symbol(&minus_one, &minus_one, place)?,
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::forms::BasisChange;

    fn xy() -> QuadraticForm {
        QuadraticForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn hexagonal() -> QuadraticForm {
        QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn square_class_counts() {
        assert_eq!(SquareClass::all(Place::Infinity).len(), 2);
        assert_eq!(SquareClass::all(Place::Prime(3)).len(), 4);
        assert_eq!(SquareClass::all(Place::Prime(2)).len(), 8);
        // closure under multiplication, and every class has an inverse
        for place in [Place::Infinity, Place::Prime(2), Place::Prime(5), Place::Prime(7)] {
            let all = SquareClass::all(place);
            for a in &all {
                assert_eq!(a.mul(a), SquareClass::one(place));
                for b in &all {
                    assert!(all.contains(&a.mul(b)));
                }
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(5, 7, Place::Prime(3)).unwrap(), 1);
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Prime(2)).unwrap(), -1);
        for a in [2i64, -3, 6, 7, -10] {
            for place in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5)] {
                assert_eq!(hilbert_symbol_int(a, -a, place).unwrap(), 1);
                assert_eq!(hilbert_symbol(&rat(a, 1), &(rat(1, 1) - rat(a, 1)), place).unwrap(), 1);
            }
        }
        assert!(matches!(hilbert_symbol_int(0, 3, Place::Prime(3)), Err(Error::ZeroArgument)));
    }

    #[test]
    fn diagonalizations() {
        let d = diagonalize_over_q(&QuadraticForm::diagonal(&[1, 3, 5])).unwrap();
        assert_eq!(d.entries, vec![rat(1, 1), rat(3, 1), rat(5, 1)]);
        assert!(d.witness.is_identity());

        let d = diagonalize_over_q(&xy()).unwrap();
        let prod = &d.entries[0] * &d.entries[1];
        assert_eq!(squarefree_part(&prod), BigInt::from(-1));

        let d = diagonalize_over_q(&hexagonal()).unwrap();
        assert_eq!(d.entries, vec![rat(1, 1), rat(3, 4)]);
        assert_eq!(hexagonal().gram().congruence(&d.witness)[(0, 1)], rat(0, 1));
    }

    #[test]
    fn hasse_examples() {
        assert_eq!(hasse_invariant(&QuadraticForm::sum_of_squares(2), Place::Prime(5)).unwrap(), 1);
        assert_eq!(hasse_invariant(&xy(), Place::Prime(2)).unwrap(), 1);
        for a in [1, 2, 3, -7, 12] {
            for p in [2, 3, 5, 7] {
                assert_eq!(hasse_invariant(&QuadraticForm::diagonal(&[a]), Place::Prime(p)).unwrap(), 1);
            }
        }
    }

    #[test]
    fn local_isometry_examples() {
        let q = hexagonal();
        let m = BasisChange::from_rows(vec![vec![2, 1], vec![1, 3]]).unwrap();
        let t = q.transform(&m).unwrap();
        for p in [2, 3, 5, 7] {
            assert!(isometric_over_qp(&q, &t, Place::Prime(p)).unwrap());
        }
        let i2 = QuadraticForm::sum_of_squares(2);
        // -1 is a square in Q_5 so x^2 + y^2 is hyperbolic there, but not in Q_3.
        assert!(isometric_over_qp(&i2, &xy(), Place::Prime(5)).unwrap());
        assert!(!isometric_over_qp(&i2, &xy(), Place::Prime(3)).unwrap());
        let i4 = QuadraticForm::sum_of_squares(4);
        assert!(!isometric_over_r(&i4, &i4.scale(-1).unwrap()).unwrap());
    }

    #[test]
    fn rational_isometry_examples() {
        let q = hexagonal();
        let m = BasisChange::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(isometric_over_q(&q, &q.transform(&m).unwrap()).unwrap());
        assert!(!isometric_over_q(&QuadraticForm::sum_of_squares(2), &QuadraticForm::diagonal(&[1, 2])).unwrap());
        // <1,1,1,1> and <1,1,2,2>: same determinant class; 2 = 1 + 1 so <2,2> ≅ <1,1> over Q.
        let a = QuadraticForm::diagonal(&[1, 1, 1, 1]);
        let b = QuadraticForm::diagonal(&[1, 1, 2, 2]);
        assert_eq!(qp_invariants(&a, Place::Prime(2)).unwrap(), qp_invariants(&b, Place::Prime(2)).unwrap());
        assert!(isometric_over_q(&a, &b).unwrap());
        assert!(!isometric_over_q(&a, &QuadraticForm::diagonal(&[1, 1, 1, 3])).unwrap());
    }

    #[test]
    fn isotropy_examples() {
        let five = QuadraticForm::sum_of_squares(5);
        for p in [2, 3, 5, 7, 11] {
            assert!(is_isotropic_over_qp(&five, Place::Prime(p)).unwrap());
            assert!(is_isotropic_over_qp(&xy(), Place::Prime(p)).unwrap());
        }
        let i4 = QuadraticForm::sum_of_squares(4);
        assert!(!is_isotropic_over_qp(&i4, Place::Prime(2)).unwrap());
        assert!(is_isotropic_over_qp(&i4, Place::Prime(3)).unwrap());
        assert!(!is_isotropic_over_qp(&i4, Place::Infinity).unwrap());
        assert!(!is_isotropic_over_qp(&QuadraticForm::diagonal(&[3]), Place::Prime(3)).unwrap());
    }
}
