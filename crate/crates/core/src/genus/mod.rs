//! Genera of positive definite forms: Z-isometry, automorphisms, Kneser
//! p-neighbors, genus enumeration, neighbor graphs and masses.

mod isometry;
mod neighbors;

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{is_prime, prime_divisors};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::local::local_genus_symbol;
use crate::theta::theta_coefficients;

pub use isometry::{automorphism_count, automorphisms, inverse_unimodular, is_isometric_z, lll, screen, AutomorphismCount, Reduced, THETA_SCREEN};
pub use neighbors::{all_p_neighbors, isotropic_points_mod_p, lift_isotropic, p_neighbor, p_neighbor_with_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Completeness {
    Verified,
    Heuristic,
}

/// Pairwise non-isometric representatives of a genus.
#[derive(Clone, Debug, Serialize)]
pub struct GenusCatalog {
    pub representatives: Vec<QuadraticForm>,
    pub aut_counts: Vec<u64>,
    pub proper_aut_counts: Vec<u64>,
    pub mass: BigRational,
    pub completeness: Completeness,
    pub primes_used: Vec<u64>,
    /// Index of the class of the starting form.
    pub start_index: usize,
}

impl GenusCatalog {
    pub fn class_number(&self) -> usize {
        self.representatives.len()
    }

    /// Index of the representative isometric to `q`, if any.
    pub fn find(&self, q: &QuadraticForm) -> Result<Option<usize>> {
        let prefix = theta_coefficients(q, THETA_SCREEN)?.coefficients;
        let mut hits = Vec::new();
        for (i, rep) in self.representatives.iter().enumerate() {
            if rep.dim() == q.dim() && rep.det_hessian() == q.det_hessian() && theta_coefficients(rep, THETA_SCREEN)?.coefficients == prefix {
                hits.push(i);
            }
        }
        if hits.len() == 1 && self.completeness == Completeness::Verified && same_genus(q, &self.representatives[hits[0]])? {
            return Ok(Some(hits[0]));
        }
        for i in hits {
            if is_isometric_z(&self.representatives[i], q)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GenusOptions {
    /// Neighbor primes; two small good primes when empty.
    pub primes: Vec<u64>,
    /// A known mass which, when reached, certifies completeness.
    pub target_mass: Option<BigRational>,
    pub max_classes: Option<usize>,
}

/// The two smallest odd primes not dividing `det H`.
pub fn default_primes(q: &QuadraticForm) -> Vec<u64> {
    let bad = prime_divisors(q.det_hessian());
    (3..).filter(|&p| is_prime(p) && !bad.contains(&p) && q.hessian_scale() % p as i64 != 0).take(2).collect()
}

struct Entry {
    form: QuadraticForm,
    theta: Vec<u64>,
    aut: AutomorphismCount,
}

fn insert(entries: &mut Vec<Entry>, q: QuadraticForm) -> Result<Option<usize>> {
    let theta = theta_coefficients(&q, THETA_SCREEN)?.coefficients;
    for e in entries.iter() {
        if e.theta == theta && is_isometric_z(&e.form, &q)?.is_some() {
            return Ok(None);
        }
    }
    let aut = automorphism_count(&q)?;
    entries.push(Entry { form: q, theta, aut });
    Ok(Some(entries.len() - 1))
}

fn mass_of(auts: impl Iterator<Item = u64>) -> BigRational {
    auts.fold(BigRational::zero(), |acc, a| acc + BigRational::new(BigInt::one(), BigInt::from(a)))
}

/// Closure of `{Q}` under p-neighbors at the given primes.
pub fn genus_enumerate(q: &QuadraticForm, primes: &[u64]) -> Result<GenusCatalog> {
    genus_enumerate_with(q, &GenusOptions { primes: primes.to_vec(), ..Default::default() })
}

pub fn genus_enumerate_with(q: &QuadraticForm, opts: &GenusOptions) -> Result<GenusCatalog> {
    q.require_positive_definite()?;
    let primes = if opts.primes.is_empty() { default_primes(q) } else { opts.primes.clone() };
    let bad = prime_divisors(q.det_hessian());
    for &p in &primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 || bad.contains(&p) {
            return Err(Error::Precondition(format!("neighbor prime {p} divides 2·det")));
        }
    }
    let start = lll(q)?.form;
    let mut entries = Vec::new();
    insert(&mut entries, start.clone())?;
    let target_met = |entries: &Vec<Entry>| opts.target_mass.as_ref().is_some_and(|t| mass_of(entries.iter().map(|e| e.aut.order)) >= *t);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        if target_met(&entries) {
            break;
        }
        for &p in &primes {
            for nb in all_p_neighbors(&entries[i].form, p)? {
                if let Some(j) = insert(&mut entries, lll(&nb)?.form)? {
                    queue.push_back(j);
                    if opts.max_classes.is_some_and(|m| entries.len() >= m) {
                        queue.clear();
                        break;
                    }
                }
            }
        }
    }
    let exhausted = queue.is_empty() && opts.max_classes.map_or(true, |m| entries.len() < m);
    let distinct: Vec<u64> = {
        let mut v = primes.clone();
        v.sort_unstable();
        v.dedup();
        v
    };
    let completeness = if target_met(&entries) || (exhausted && distinct.len() >= 2 && q.dim() >= 3) {
        Completeness::Verified
    } else {
        Completeness::Heuristic
    };
    entries.sort_by(|a, b| a.theta.cmp(&b.theta).then_with(|| a.form.hessian().cmp(b.form.hessian())));
    let start_index = entries.iter().position(|e| e.form == start).unwrap_or(0);
    let mass = mass_of(entries.iter().map(|e| e.aut.order));
    Ok(GenusCatalog {
        aut_counts: entries.iter().map(|e| e.aut.order).collect(),
        proper_aut_counts: entries.iter().map(|e| e.aut.proper).collect(),
        representatives: entries.into_iter().map(|e| e.form).collect(),
        mass,
        completeness,
        primes_used: distinct,
        start_index,
    })
}

/// `Σ 1/|Aut|` over the catalog, with the catalog's completeness flag.
pub fn mass(catalog: &GenusCatalog) -> (BigRational, Completeness) {
    (mass_of(catalog.aut_counts.iter().copied()), catalog.completeness)
}

/// Equal dimension, determinant, signature and local genus symbols at every `p | 2·det`.
pub fn same_genus(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<bool> {
    if q1.dim() != q2.dim() || q1.det_hessian() != q2.det_hessian() || q1.signature()? != q2.signature()? {
        return Ok(false);
    }
    let mut primes = prime_divisors(q1.det_hessian());
    if !primes.contains(&2) {
        primes.push(2);
    }
    for p in primes {
        if local_genus_symbol(q1, p)? != local_genus_symbol(q2, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The p-neighbor multigraph on the classes of a catalog.
#[derive(Clone, Debug, Serialize)]
pub struct NeighborGraph {
    pub p: u64,
    pub vertices: Vec<usize>,
    /// `(i, j, multiplicity)`: `multiplicity` neighbors of class `i` lie in class `j`.
    pub edges: Vec<(usize, usize, u64)>,
}

impl NeighborGraph {
    pub fn degree(&self, v: usize) -> u64 {
        self.edges.iter().filter(|e| e.0 == v).map(|e| e.2).sum()
    }

    pub fn is_regular(&self) -> bool {
        let mut degrees = self.vertices.iter().map(|&v| self.degree(v));
        let first = degrees.next();
        degrees.all(|d| Some(d) == first)
    }
}

pub fn neighbor_graph(catalog: &GenusCatalog, p: u64) -> Result<NeighborGraph> {
    let h = catalog.class_number();
    let mut edges = Vec::new();
    for (i, rep) in catalog.representatives.iter().enumerate() {
        let mut counts = vec![0u64; h];
        for nb in all_p_neighbors(rep, p)? {
            let j = catalog.find(&lll(&nb)?.form)?.ok_or(Error::IncompleteCatalog)?;
            counts[j] += 1;
        }
        edges.extend(counts.into_iter().enumerate().filter(|c| c.1 > 0).map(|(j, c)| (i, j, c)));
    }
    Ok(NeighborGraph { p, vertices: (0..h).collect(), edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn small_catalogs() {
        let c = genus_enumerate(&QuadraticForm::sum_of_squares(4), &[3, 5]).unwrap();
        assert_eq!(c.class_number(), 1);
        assert_eq!(c.mass, rat(1, 384));
        assert_eq!(c.completeness, Completeness::Verified);
        let c = genus_enumerate(&QuadraticForm::sum_of_squares(2), &[5, 13]).unwrap();
        assert_eq!((c.class_number(), c.mass.clone()), (1, rat(1, 8)));
        let hex = QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let c = genus_enumerate(&hex, &[7, 13]).unwrap();
        assert_eq!((c.class_number(), c.mass.clone()), (1, rat(1, 12)));
        assert_eq!(mass(&c).1, Completeness::Heuristic);
        assert!(genus_enumerate(&QuadraticForm::sum_of_squares(4), &[2]).is_err());
    }

    #[test]
    fn graphs_of_four_squares() {
        let c = genus_enumerate(&QuadraticForm::sum_of_squares(4), &[3, 5]).unwrap();
        let g = neighbor_graph(&c, 3).unwrap();
        assert_eq!(g.edges, vec![(0, 0, 16)]);
        assert_eq!(neighbor_graph(&c, 5).unwrap().edges, vec![(0, 0, 36)]);
    }

    #[test]
    fn two_class_genus() {
        let q = QuadraticForm::diagonal(&[1, 1, 7]);
        let c = genus_enumerate(&q, &[3, 5]).unwrap();
        assert_eq!(c.class_number(), 2);
        assert_eq!(c.mass, rat(3, 16));
        assert_eq!(c.completeness, Completeness::Verified);
        for rep in &c.representatives {
            assert!(same_genus(&q, rep).unwrap());
        }
        assert!(is_isometric_z(&c.representatives[0], &c.representatives[1]).unwrap().is_none());
        let g = neighbor_graph(&c, 3).unwrap();
        assert!(g.is_regular());
        assert_eq!(g.degree(0), isotropic_points_mod_p(&q, 3).unwrap().len() as u64);
        // starting from the other class gives the same catalog
        let other = c.representatives[1 - c.start_index].clone();
        let c2 = genus_enumerate(&other, &[3, 5]).unwrap();
        assert_eq!(c2.representatives, c.representatives);
        assert_ne!(c2.start_index, c.start_index);
    }

    #[test]
    fn target_mass_certifies() {
        let hex = QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let opts = GenusOptions { primes: vec![7], target_mass: Some(rat(1, 12)), max_classes: None };
        assert_eq!(genus_enumerate_with(&hex, &opts).unwrap().completeness, Completeness::Verified);
    }
}
