//! Local lattice classes for SL(2) at a place of F_q(t): Hermite
//! representatives [[z^a, p], [0, z^-a]] with p taken modulo z^a, the
//! integrality condition against a regular semisimple matrix, and Iwasawa
//! heights for the upper and lower Borel extracted from the representative.

use super::ff::FiniteField;
use super::fps::LSeries;
use super::places::{Place, PlaceKind};
use super::poly::{expand_at_infinity, RatFunc, Re, ResidueField};
use crate::ratmat::{rat_i, Rat};
use crate::{Error, Result};

/// 2x2 matrix of rational functions (the global section in a trivialization).
#[derive(Debug, Clone)]
pub struct Mat2 {
    pub e: [[RatFunc; 2]; 2],
}

impl Mat2 {
    pub fn diag(ff: &FiniteField, l1: RatFunc, l2: RatFunc) -> Result<Mat2> {
        let zero = RatFunc::new(ff, vec![], vec![ff.one()])?;
        Ok(Mat2 {
            e: [[l1, zero.clone()], [zero, l2]],
        })
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[0][1].is_zero() && self.e[1][0].is_zero()
    }
}

/// The residue field of a place; infinity uses the degree-one modulus t with
/// the uniformizer understood as 1/t.
pub fn residue_field(ff: &FiniteField, place: &Place) -> Result<ResidueField> {
    match &place.kind {
        PlaceKind::Finite(pi) => ResidueField::new(ff, pi),
        PlaceKind::Infinity => ResidueField::new(ff, &vec![ff.zero(), ff.one()]),
    }
}

/// Exact local expansion of a rational function at a place.
pub fn expand_at(
    ff: &FiniteField,
    rf: &ResidueField,
    place: &Place,
    f: &RatFunc,
    prec: i64,
) -> LSeries {
    if f.is_zero() {
        return LSeries::zero(prec);
    }
    match &place.kind {
        PlaceKind::Finite(_) => rf.expand(f, prec),
        PlaceKind::Infinity => expand_at_infinity(ff, f, prec),
    }
}

pub fn val_at_place(ff: &FiniteField, place: &Place, f: &RatFunc) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    Some(match &place.kind {
        PlaceKind::Finite(pi) => f.val_at(ff, pi),
        PlaceKind::Infinity => f.val_at_infinity(),
    })
}

/// A lattice class at one place: the Hermite representative
/// [[z^a, p], [0, z^-a]] with p a coset modulo z^a, plus cached heights.
#[derive(Debug, Clone)]
pub struct LocalClass {
    pub place: Place,
    pub a: i64,
    pub p: LSeries,
    /// Height for the upper Borel (local, unweighted by the place degree).
    pub hb: Vec<Rat>,
    /// Height for the lower Borel.
    pub hbbar: Vec<Rat>,
}

impl LocalClass {
    pub fn trivial(place: &Place) -> LocalClass {
        LocalClass {
            place: place.clone(),
            a: 0,
            p: LSeries::zero(0),
            hb: vec![rat_i(0), rat_i(0)],
            hbbar: vec![rat_i(0), rat_i(0)],
        }
    }

    pub fn diagonal(place: &Place, a: i64) -> LocalClass {
        LocalClass {
            place: place.clone(),
            a,
            p: LSeries::zero(a),
            hb: vec![rat_i(-a), rat_i(a)],
            hbbar: vec![rat_i(-a), rat_i(a)],
        }
    }

    /// The representative matrix as series, to the given precision (the
    /// canonical coset representative with vanishing higher coefficients).
    pub fn rep(&self, rf: &ResidueField, prec: i64) -> [[LSeries; 2]; 2] {
        let mut p = LSeries::zero(prec);
        for d in self.p.valuation().unwrap_or(0)..self.p.trunc() {
            if let Ok(c) = self.p.coeff(d) {
                p = p.add(rf, &LSeries::monomial(rf, c, d, prec));
            }
        }
        [
            [LSeries::monomial(rf, rf.one(), self.a, prec), p],
            [
                LSeries::zero(prec),
                LSeries::monomial(rf, rf.one(), -self.a, prec),
            ],
        ]
    }
}

fn min_val(row: &[&LSeries]) -> Option<i64> {
    row.iter().filter_map(|s| s.valuation()).min()
}

/// Height with respect to the upper Borel: in g = b k the torus part of b
/// has valuation -min val of the second row of g.
pub fn iwasawa_height_upper(g: &[[LSeries; 2]; 2]) -> Result<Vec<Rat>> {
    let v = min_val(&[&g[1][0], &g[1][1]]).ok_or(Error::NotInvertible)?;
    Ok(vec![rat_i(v), rat_i(-v)])
}

/// Height with respect to the lower Borel: val(t1) = min val of the first row.
pub fn iwasawa_height_lower(g: &[[LSeries; 2]; 2]) -> Result<Vec<Rat>> {
    let v = min_val(&[&g[0][0], &g[0][1]]).ok_or(Error::NotInvertible)?;
    Ok(vec![rat_i(-v), rat_i(v)])
}

pub fn mat_mul(
    rf: &ResidueField,
    a: &[[LSeries; 2]; 2],
    b: &[[LSeries; 2]; 2],
) -> [[LSeries; 2]; 2] {
    let f = |i: usize, j: usize| {
        a[i][0]
            .mul(rf, &b[0][j])
            .add(rf, &a[i][1].mul(rf, &b[1][j]))
    };
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

/// Column-reduces a determinant-one series matrix to the Hermite shape
/// [[z^a, p], [0, z^-a]] by right multiplication with integral
/// determinant-one matrices, and returns (a, p mod z^a). This is the
/// independent normal-form route used to cross-check the parametric class
/// bookkeeping.
pub fn hermite_upper(rf: &ResidueField, g: &[[LSeries; 2]; 2]) -> Result<(i64, LSeries)> {
    // cols[j] = (top, bottom) of the j-th column.
    let mut cols: [[LSeries; 2]; 2] = [
        [g[0][0].clone(), g[1][0].clone()],
        [g[0][1].clone(), g[1][1].clone()],
    ];
    let swap = |cols: &mut [[LSeries; 2]; 2]| {
        // Right multiplication by [[0,-1],[1,0]]: (c0, c1) -> (c1, -c0).
        let c0 = cols[0].clone();
        let c1 = cols[1].clone();
        cols[0] = c1;
        cols[1] = [c0[0].neg(rf), c0[1].neg(rf)];
    };
    match (cols[0][1].valuation(), cols[1][1].valuation()) {
        (None, _) => {}
        (Some(_), None) => swap(&mut cols),
        (Some(a0), Some(a1)) => {
            if a0 >= a1 {
                let q = cols[0][1].mul(rf, &cols[1][1].inverse(rf)?);
                cols[0] = [
                    cols[0][0].sub(rf, &q.mul(rf, &cols[1][0])),
                    cols[0][1].sub(rf, &q.mul(rf, &cols[1][1])),
                ];
            } else {
                let q = cols[1][1].mul(rf, &cols[0][1].inverse(rf)?);
                cols[1] = [
                    cols[1][0].sub(rf, &q.mul(rf, &cols[0][0])),
                    cols[1][1].sub(rf, &q.mul(rf, &cols[0][1])),
                ];
                swap(&mut cols);
            }
        }
    }
    if !cols[0][1].is_known_zero() {
        return Err(Error::PrecisionLoss {
            needed: cols[0][1].valuation().unwrap_or(0),
            trunc: cols[0][1].trunc(),
        });
    }
    // Upper triangular [[A, B], [0, D]] with A D = 1. Scaling the columns
    // by (u_A^{-1}, u_A), where u_A is the unit part of A, lands on
    // [[z^a, B u_A], [0, z^{-a}]].
    let a_entry = &cols[0][0];
    let b_entry = &cols[1][0];
    let va = a_entry.valuation().ok_or(Error::NotInvertible)?;
    let unit_a = a_entry.shift(-va);
    let p = b_entry.mul(rf, &unit_a);
    Ok((va, p.with_trunc(va)))
}

/// Valuation bound for the eigenvalue gap at a place: exact val(l1 - l2)
/// for diagonal X, and the discriminant valuation (an upper bound for it)
/// otherwise. Errors when X is not regular semisimple.
pub fn eigen_gap_val(ff: &FiniteField, x: &Mat2, place: &Place) -> Result<i64> {
    if x.is_diagonal() {
        let delta = super::poly::rf_sub(ff, &x.e[0][0], &x.e[1][1])?;
        if delta.is_zero() {
            return Err(Error::Unsupported(
                "matrix is not regular semisimple (equal diagonal values)".into(),
            ));
        }
        Ok(val_at_place(ff, place, &delta).unwrap_or(0))
    } else {
        // disc = tr^2 - 4 det = (x00 - x11)^2 + 4 x01 x10.
        let tr_diff = super::poly::rf_sub(ff, &x.e[0][0], &x.e[1][1])?;
        let sq = super::poly::rf_mul(ff, &tr_diff, &tr_diff)?;
        let four = RatFunc::new(ff, vec![ff.from_int(4)], vec![ff.one()])?;
        let cross =
            super::poly::rf_mul(ff, &four, &super::poly::rf_mul(ff, &x.e[0][1], &x.e[1][0])?)?;
        let disc = super::poly::rf_add(ff, &sq, &cross)?;
        if disc.is_zero() {
            return Err(Error::Unsupported(
                "matrix is not regular semisimple (vanishing discriminant)".into(),
            ));
        }
        Ok(val_at_place(ff, place, &disc).unwrap_or(0))
    }
}

/// Certified diagonal-window bound: val(l1 - l2) + d_v + 1.
pub fn certified_window(ff: &FiniteField, x: &Mat2, place: &Place, d_v: u32) -> i64 {
    let val = eigen_gap_val(ff, x, place).unwrap_or(0);
    val + d_v as i64 + 1
}

/// `local_springer`: all classes [[z^a, p], [0, z^-a]] with |a| <= window
/// whose conjugate of X is integral up to the pole allowance z^{-d_v},
/// enumerated by brute force over the certified coefficient window of p.
pub fn local_springer(
    ff: &FiniteField,
    x: &Mat2,
    place: &Place,
    d_v: u32,
    window: i64,
) -> Result<Vec<LocalClass>> {
    let needed = certified_window(ff, x, place, d_v);
    if window < needed {
        return Err(Error::WindowTooSmall {
            given: window,
            needed,
        });
    }
    local_springer_unchecked(ff, x, place, d_v, window, None)
}

/// Same enumeration with an explicit off-diagonal coefficient window
/// (`cap`), used by the stability-under-growth tests.
pub fn local_springer_unchecked(
    ff: &FiniteField,
    x: &Mat2,
    place: &Place,
    d_v: u32,
    window: i64,
    cap_override: Option<i64>,
) -> Result<Vec<LocalClass>> {
    let rf = residue_field(ff, place)?;
    let d = d_v as i64;
    let val_delta = eigen_gap_val(ff, x, place)?;
    // Off-diagonal coefficient window. For diagonal X the integrality
    // condition caps val(p) >= a - (d + val(delta)) exactly; otherwise the
    // eigenvector directions can push val(p) down to -a, hence the margin.
    let cap = cap_override.unwrap_or_else(|| {
        if x.is_diagonal() {
            (d + val_delta).max(0)
        } else {
            (d + val_delta + 2 * window).max(0)
        }
    });
    let prec = 2 * (window + d.abs() + cap) + 6;
    let xs: [[LSeries; 2]; 2] = [
        [
            expand_at(ff, &rf, place, &x.e[0][0], prec),
            expand_at(ff, &rf, place, &x.e[0][1], prec),
        ],
        [
            expand_at(ff, &rf, place, &x.e[1][0], prec),
            expand_at(ff, &rf, place, &x.e[1][1], prec),
        ],
    ];
    let els = rf.elements();
    let mut out = Vec::new();
    for a in -window..=window {
        // All coefficient vectors (c_{a-cap}, .., c_{a-1}).
        let mut tuples: Vec<Vec<Re>> = vec![vec![]];
        for _ in 0..cap {
            let mut next = Vec::with_capacity(tuples.len() * els.len());
            for t in &tuples {
                for c in &els {
                    let mut v = t.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            tuples = next;
        }
        for cand in &tuples {
            // Exact polynomial representative of the coset p mod z^a.
            let mut p_exact = LSeries::zero(prec);
            for (k, c) in cand.iter().enumerate() {
                p_exact = p_exact.add(
                    &rf,
                    &LSeries::monomial(&rf, c.clone(), a - cap + k as i64, prec),
                );
            }
            if class_satisfies(&rf, &xs, a, &p_exact, d, prec)? {
                let p_coset = p_exact.with_trunc(a);
                let c_low = p_coset.valuation().unwrap_or(a).min(a);
                out.push(LocalClass {
                    place: place.clone(),
                    a,
                    p: p_coset,
                    hb: vec![rat_i(-a), rat_i(a)],
                    hbbar: vec![rat_i(-c_low), rat_i(c_low)],
                });
            }
        }
    }
    Ok(out)
}

fn class_satisfies(
    rf: &ResidueField,
    xs: &[[LSeries; 2]; 2],
    a: i64,
    p_exact: &LSeries,
    d: i64,
    prec: i64,
) -> Result<bool> {
    let g = [
        [LSeries::monomial(rf, rf.one(), a, prec), p_exact.clone()],
        [
            LSeries::zero(prec),
            LSeries::monomial(rf, rf.one(), -a, prec),
        ],
    ];
    let ginv = [
        [LSeries::monomial(rf, rf.one(), -a, prec), p_exact.neg(rf)],
        [
            LSeries::zero(prec),
            LSeries::monomial(rf, rf.one(), a, prec),
        ],
    ];
    let m = mat_mul(rf, &mat_mul(rf, &ginv, xs), &g);
    for row in &m {
        for e in row {
            // Need every coefficient below -d to be known.
            if e.trunc() < -d {
                return Err(Error::PrecisionLoss {
                    needed: -d,
                    trunc: e.trunc(),
                });
            }
            if let Some(v) = e.valuation() {
                if v < -d {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}


#[cfg(test)]
mod hermite_tests {
    use super::*;
    use crate::adelic::places::Place;
    use crate::adelic::poly::parse_ratfunc;

    fn diag_x(ff: &FiniteField, l: &str) -> Mat2 {
        let lam = parse_ratfunc(ff, l).unwrap();
        let neg = RatFunc::new(ff, super::super::poly::neg(ff, &lam.num), lam.den.clone()).unwrap();
        Mat2::diag(ff, lam, neg).unwrap()
    }

    fn series_eq_mod(rf: &ResidueField, a: &LSeries, b: &LSeries, upto: i64) -> bool {
        for d in -12..upto {
            let ca = a.coeff(d).unwrap_or_default();
            let cb = b.coeff(d).unwrap_or_default();
            if rf.sub(&ca, &cb) != rf.zero() && !(rf.is_zero(&ca) && rf.is_zero(&cb)) {
                return false;
            }
        }
        true
    }

    #[test]
    fn normal_form_recovers_the_class() {
        let ff = FiniteField::new(3).unwrap();
        let x = diag_x(&ff, "(t+1)/t");
        let v = Place::finite(&ff, parse_ratfunc(&ff, "t+1").unwrap().num).unwrap();
        let rf = residue_field(&ff, &v).unwrap();
        for c in local_springer(&ff, &x, &v, 0, 2).unwrap() {
            let g = c.rep(&rf, 10);
            let (a, p) = hermite_upper(&rf, &g).unwrap();
            assert_eq!(a, c.a);
            assert!(series_eq_mod(&rf, &p, &c.p, a));
        }
    }

    #[test]
    fn normal_form_is_k_invariant() {
        // Multiplying a representative on the right by integral
        // determinant-one matrices must not change the normal form.
        let ff = FiniteField::new(5).unwrap();
        let x = diag_x(&ff, "(t+1)/t");
        let v = Place::finite(&ff, parse_ratfunc(&ff, "t+1").unwrap().num).unwrap();
        let rf = residue_field(&ff, &v).unwrap();
        let prec = 12;
        // A few elements of K: unipotents, a diagonal unit, and a rotation.
        let one = LSeries::constant(&rf, rf.one(), prec);
        let zero = LSeries::zero(prec);
        let zpoly = LSeries::monomial(&rf, rf.from_int_base(3), 1, prec)
            .add(&rf, &LSeries::constant(&rf, rf.from_int_base(2), prec));
        let unip_up = [[one.clone(), zpoly.clone()], [zero.clone(), one.clone()]];
        let unip_dn = [[one.clone(), zero.clone()], [zpoly.clone(), one.clone()]];
        let u = LSeries::constant(&rf, rf.from_int_base(2), prec);
        let uinv = u.inverse(&rf).unwrap();
        let diag_u = [[u, zero.clone()], [zero.clone(), uinv]];
        let rot = [[zero.clone(), one.neg(&rf)], [one.clone(), zero.clone()]];
        for c in local_springer(&ff, &x, &v, 0, 2).unwrap() {
            let g = c.rep(&rf, prec);
            for k in [&unip_up, &unip_dn, &diag_u, &rot] {
                let gk = mat_mul(&rf, &g, k);
                let (a, p) = hermite_upper(&rf, &gk).unwrap();
                assert_eq!(a, c.a, "a changed under K for {:?}", c.a);
                assert!(series_eq_mod(&rf, &p, &c.p, a), "p changed under K");
            }
        }
    }

    #[test]
    fn torus_action_matches_prediction() {
        // Left multiplication by diag(y, y^{-1}) shifts a by val(y) and
        // scales the off-diagonal coset by the square of the unit part:
        // checked against the honest normal-form computation.
        let ff = FiniteField::new(3).unwrap();
        let x = diag_x(&ff, "(t+1)/t");
        let v = Place::finite(&ff, parse_ratfunc(&ff, "t+1").unwrap().num).unwrap();
        let rf = residue_field(&ff, &v).unwrap();
        let prec = 14;
        for y_str in ["t+1", "2*t+2", "(t+1)^2", "2", "t", "1/(t+1)"] {
            let y = parse_ratfunc(&ff, y_str).unwrap();
            let ys = expand_at(&ff, &rf, &v, &y, prec);
            let m = ys.valuation().unwrap();
            let unit = ys.shift(-m);
            let unit_sq = unit.mul(&rf, &unit);
            let yinv = ys.inverse(&rf).unwrap();
            for c in local_springer(&ff, &x, &v, 0, 2).unwrap() {
                let g = c.rep(&rf, prec);
                let tg = [
                    [ys.mul(&rf, &g[0][0]), ys.mul(&rf, &g[0][1])],
                    [yinv.mul(&rf, &g[1][0]), yinv.mul(&rf, &g[1][1])],
                ];
                let (a, p) = hermite_upper(&rf, &tg).unwrap();
                assert_eq!(a, c.a + m, "degree shift wrong for y = {y_str}");
                let predicted =
                    c.p.with_trunc(c.a)
                        .shift(m)
                        .mul(&rf, &unit_sq)
                        .with_trunc(a);
                assert!(
                    series_eq_mod(&rf, &p, &predicted, a),
                    "unit-square action wrong for y = {y_str}"
                );
            }
        }
    }
}
