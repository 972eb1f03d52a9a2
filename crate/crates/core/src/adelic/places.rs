//! Places of F_q(t): monic irreducible polynomials plus the place at
//! infinity, with degrees and display helpers.

use super::ff::FiniteField;
use super::poly::{self, Poly};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlaceKind {
    Finite(Poly),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Place {
    pub kind: PlaceKind,
    pub degree: usize,
}

impl Place {
    pub fn finite(ff: &FiniteField, pi: Poly) -> Result<Place> {
        if !poly::is_irreducible(ff, &pi) {
            return Err(Error::NotIrreducible);
        }
        let pi = poly::make_monic(ff, &pi);
        let degree = poly::degree(&pi).expect("irreducible is nonzero");
        Ok(Place {
            kind: PlaceKind::Finite(pi),
            degree,
        })
    }

    pub fn infinity() -> Place {
        Place {
            kind: PlaceKind::Infinity,
            degree: 1,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.kind, PlaceKind::Infinity)
    }

    pub fn display(&self, ff: &FiniteField) -> String {
        match &self.kind {
            PlaceKind::Finite(pi) => poly::display(ff, pi),
            PlaceKind::Infinity => "infinity".into(),
        }
    }
}

/// `places`: all finite places of degree <= deg_bound, plus infinity.
pub fn places(ff: &FiniteField, deg_bound: usize) -> Vec<Place> {
    let mut out = Vec::new();
    for d in 1..=deg_bound {
        for pi in poly::monic_of_degree(ff, d) {
            if poly::is_irreducible(ff, &pi) {
                out.push(Place {
                    kind: PlaceKind::Finite(pi),
                    degree: d,
                });
            }
        }
    }
    out.push(Place::infinity());
    out.sort();
    out
}

/// Number of monic irreducibles of degree d over F_q (necklace counting),
/// used as the oracle for `places`.
pub fn necklace_count(q: u64, d: usize) -> u64 {
    let moebius = |n: usize| -> i64 {
        let mut n = n;
        let mut m = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    };
    let mut total = 0i64;
    for e in 1..=d {
        if d % e == 0 {
            total += moebius(d / e) * (q.pow(e as u32) as i64);
        }
    }
    (total / d as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn place_counts_match_necklace() {
        for q in [2u64, 3, 5] {
            let ff = FiniteField::new(q).unwrap();
            for d in 1..=3usize {
                let count = places(&ff, d)
                    .iter()
                    .filter(|p| !p.is_infinity() && p.degree == d)
                    .count() as u64;
                assert_eq!(count, necklace_count(q, d), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn small_examples() {
        let f2 = FiniteField::new(2).unwrap();
        // q=2, degree 1: t, t+1, plus infinity.
        assert_eq!(places(&f2, 1).len(), 3);
        // degree 2 adds the unique irreducible quadratic t^2+t+1.
        assert_eq!(places(&f2, 2).len(), 4);
        let f3 = FiniteField::new(3).unwrap();
        // (q^2 - q)/2 = 3 irreducible quadratics over F_3.
        let quads = places(&f3, 2).iter().filter(|p| p.degree == 2).count();
        assert_eq!(quads, 3);
    }
}
