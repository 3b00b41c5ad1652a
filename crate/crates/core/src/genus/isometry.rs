//! Automorphism counting and Z-isometry testing by backtracking over short vectors.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::forms::{BasisChange, QuadraticForm};
use crate::linalg::{bareiss_det_i64, lll_reduce};
use crate::theta::{representations, theta_coefficients};

/// Bound for the theta pre-screen before backtracking.
pub const THETA_SCREEN: u64 = 16;

/// A form together with the unimodular `T` (columns = new basis) taking
/// the original to its LLL-reduced version.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub form: QuadraticForm,
    pub basis: Vec<i64>,
}

pub fn lll(q: &QuadraticForm) -> Result<Reduced> {
    q.require_positive_definite()?;
    let n = q.dim();
    let t = lll_reduce(q.hessian(), n);
    let form = q.transform(&BasisChange::new(n, t.clone())?)?;
    Ok(Reduced { form, basis: t })
}

/// Orders of `Aut(Q)` and of its determinant-one subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutomorphismCount {
    pub order: u64,
    pub proper: u64,
}

struct Search<'a> {
    target: &'a QuadraticForm,
    /// Candidate images for each target basis vector, with `H_source · y` cached.
    candidates: Vec<Vec<(Vec<i64>, Vec<i64>)>>,
}

impl<'a> Search<'a> {
    fn new(source: &'a QuadraticForm, target: &'a QuadraticForm) -> Result<Search<'a>> {
        let n = target.dim();
        let mut candidates = Vec::with_capacity(n);
        for i in 0..n {
            let norm = (target.h(i, i) / 2) as u64;
            let vs = representations(source, norm)?;
            candidates.push(
                vs.into_iter()
                    .map(|y| {
                        let hy = (0..n).map(|r| (0..n).map(|c| source.h(r, c) * y[c]).sum()).collect();
                        (y, hy)
                    })
                    .collect(),
            );
        }
        Ok(Search { target, candidates })
    }

    fn fits(&self, chosen: &[usize], i: usize, idx: usize) -> bool {
        let (_, hy) = &self.candidates[i][idx];
        chosen.iter().enumerate().all(|(j, &cj)| {
            let yj = &self.candidates[j][cj].0;
            hy.iter().zip(yj).map(|(a, b)| a * b).sum::<i64>() == self.target.h(i, j)
        })
    }

    fn matrix(&self, chosen: &[usize]) -> Vec<i64> {
        let n = self.target.dim();
        let mut m = vec![0i64; n * n];
        for (j, &c) in chosen.iter().enumerate() {
            for r in 0..n {
                m[r * n + j] = self.candidates[j][c].0[r];
            }
        }
        m
    }

    /// Visits every complete assignment; the visitor returns false to stop.
    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let mut chosen = Vec::with_capacity(self.target.dim());
        self.rec(&mut chosen, visit);
    }

    fn rec(&self, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let i = chosen.len();
        if i == self.target.dim() {
            return visit(chosen);
        }
        for idx in 0..self.candidates[i].len() {
            if self.fits(chosen, i, idx) {
                chosen.push(idx);
                let go_on = self.rec(chosen, visit);
                chosen.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// `|Aut(Q)|` for positive definite `Q`, by extending images of a reduced basis.
pub fn automorphism_count(q: &QuadraticForm) -> Result<AutomorphismCount> {
    let r = lll(q)?;
    let s = Search::new(&r.form, &r.form)?;
    let n = q.dim();
    let (mut order, mut proper) = (0u64, 0u64);
    s.run(&mut |c| {
        order += 1;
        if bareiss_det_i64(&s.matrix(c), n).is_positive() {
            proper += 1;
        }
        true
    });
    Ok(AutomorphismCount { order, proper })
}

/// All automorphisms of `Q` in the original basis.
pub fn automorphisms(q: &QuadraticForm) -> Result<Vec<BasisChange>> {
    let r = lll(q)?;
    let n = q.dim();
    let tinv = inverse_unimodular(&r.basis, n)?;
    let s = Search::new(&r.form, &r.form)?;
    let mut out = Vec::new();
    s.run(&mut |c| {
        out.push(s.matrix(c));
        true
    });
    out.into_iter().map(|m| BasisChange::new(n, mat_mul(&mat_mul(&r.basis, &m, n), &tinv, n))).collect()
}

/// Inverse of an integer matrix with determinant ±1.
pub fn inverse_unimodular(t: &[i64], n: usize) -> Result<Vec<i64>> {
    let b = BasisChange::new(n, t.to_vec())?;
    if !b.is_unimodular() {
        return Err(Error::NotInvertible);
    }
    let inv = b.to_rat().inverse()?;
    let ints = inv.to_integers().ok_or(Error::NotInvertible)?;
    ints.iter().map(|x| i64::try_from(x).map_err(|_| Error::Overflow("inverse"))).collect()
}

pub(crate) fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Cheap invariants that must agree for isometric forms.
pub fn screen(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    if q1.dim() != q2.dim() || q1.det_hessian() != q2.det_hessian() {
        return Ok(false);
    }
    if q1.level()? != q2.level()? {
        return Ok(false);
    }
    Ok(theta_coefficients(q1, THETA_SCREEN)?.coefficients == theta_coefficients(q2, THETA_SCREEN)?.coefficients)
}

/// A unimodular `M` with `Mᵗ H₁ M = H₂`, or `None` when the forms are not Z-isometric.
pub fn is_isometric_z(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<Option<BasisChange>> {
    q1.require_positive_definite()?;
    q2.require_positive_definite()?;
    if !screen(q1, q2)? {
        return Ok(None);
    }
    let r1 = lll(q1)?;
    let r2 = lll(q2)?;
    let n = q1.dim();
    let s = Search::new(&r1.form, &r2.form)?;
    let mut found = None;
    s.run(&mut |c| {
        found = Some(s.matrix(c));
        false
    });
    let Some(mp) = found else { return Ok(None) };
    let m = mat_mul(&mat_mul(&r1.basis, &mp, n), &inverse_unimodular(&r2.basis, n)?, n);
    let m = BasisChange::new(n, m)?;
    debug_assert_eq!(&q1.transform(&m)?, q2);
    debug_assert!(m.det().abs().is_one());
    Ok(Some(m))
}
