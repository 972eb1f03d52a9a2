//! Global counting over F_q(t) with the base curve fixed to the projective
//! line: characteristic data, enumeration of adelic points modulo the torus
//! action, weighted orbital integrals, the torus volume, descent, and the
//! fiber count computed by two independent pipelines.

use super::ff::{Fe, FiniteField};
use super::local::{
    self, iwasawa_height_lower, iwasawa_height_upper, local_springer, LocalClass, Mat2,
};
use super::places::{Place, PlaceKind};
use super::poly::{self, RatFunc, Re, ResidueField};
use crate::polytope::{validate_family, PositiveOrthogonalFamily};
use crate::ratmat::{rat_i, vadd, vscale, Rat};
use crate::rootdata::{
    cochar_lattice, covolume_ratio, is_general_position, torus, GroupData, LatticeKind, Levi,
    Parabolic,
};
use crate::weights::{v_weight, w_weight, Method, NormalizedScalar};
use crate::{Error, Result};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// The characteristic cases supported by the desk-scale layer.
#[derive(Debug, Clone)]
pub enum CharCase {
    /// SL(2) split: X = diag(lambda, -lambda); odd characteristic.
    SplitSl { lambda: RatFunc },
    /// GL(2)-projected convenience layer: X = diag(l1, l2); any q (this is
    /// the only entry point for q = 2). Counting theorems stay SL(2)-only.
    Gl2Split { l1: RatFunc, l2: RatFunc },
    /// Elliptic with constant nonsquare c: X = [[0,1],[c,0]], D = 0,
    /// trivial weight only.
    Elliptic { c: Fe },
}

/// A characteristic datum over F_q(t): the divisor D (finite places only),
/// the spectral data, and the ordering of the eigenvalues at infinity.
#[derive(Debug, Clone)]
pub struct CharDatum {
    pub ff: FiniteField,
    pub divisor: Vec<(Place, u32)>,
    pub case: CharCase,
    /// Eigenvalue ordering at infinity for the split cases.
    pub t_order: Option<(Fe, Fe)>,
}

impl CharDatum {
    /// The global section in the standard trivialization.
    pub fn x_matrix(&self) -> Result<Mat2> {
        let ff = &self.ff;
        match &self.case {
            CharCase::SplitSl { lambda } => {
                let neg = RatFunc::new(ff, poly::neg(ff, &lambda.num), lambda.den.clone())?;
                Mat2::diag(ff, lambda.clone(), neg)
            }
            CharCase::Gl2Split { l1, l2 } => Mat2::diag(ff, l1.clone(), l2.clone()),
            CharCase::Elliptic { c } => {
                let zero = RatFunc::new(ff, vec![], vec![ff.one()])?;
                let one = RatFunc::new(ff, vec![ff.one()], vec![ff.one()])?;
                let cc = RatFunc::new(ff, vec![c.clone()], vec![ff.one()])?;
                Ok(Mat2 {
                    e: [[zero.clone(), one], [cc, zero]],
                })
            }
        }
    }

    /// The Levi class of the characteristic: the torus for split data, the
    /// full group for elliptic data.
    pub fn levi(&self, g: &GroupData) -> Levi {
        match self.case {
            CharCase::Elliptic { .. } => crate::rootdata::full_levi(g),
            _ => torus(g),
        }
    }

    pub fn is_split(&self) -> bool {
        !matches!(self.case, CharCase::Elliptic { .. })
    }

    pub fn deg_divisor(&self) -> i64 {
        self.divisor
            .iter()
            .map(|(p, d)| p.degree as i64 * *d as i64)
            .sum()
    }

    fn d_at(&self, place: &Place) -> u32 {
        self.divisor
            .iter()
            .find(|(p, _)| p == place)
            .map(|(_, d)| *d)
            .unwrap_or(0)
    }
}

/// `build_char`: validates the divisor, pole bounds and regularity at
/// infinity, and fixes the eigenvalue ordering there.
pub fn build_char(
    ff: &FiniteField,
    divisor: Vec<(Place, u32)>,
    case: CharCase,
) -> Result<CharDatum> {
    for (p, _) in &divisor {
        if p.is_infinity() {
            return Err(Error::InfinityInDivisor);
        }
    }
    let check_pole = |f: &RatFunc| -> Result<()> {
        if f.is_zero() {
            return Err(Error::InfinityRegularity("zero eigenvalue section".into()));
        }
        // Poles only at divisor places, with bounded order.
        for (pi, m) in poly::factor(ff, &f.den) {
            let place = Place::finite(ff, pi)?;
            let allowed = divisor
                .iter()
                .find(|(p, _)| *p == place)
                .map(|(_, d)| *d)
                .unwrap_or(0);
            if m > allowed {
                return Err(Error::PoleExcess(place.display(ff)));
            }
        }
        if f.val_at_infinity() < 0 {
            return Err(Error::InfinityRegularity(
                "pole at infinity is not allowed".into(),
            ));
        }
        Ok(())
    };
    let t_order = match &case {
        CharCase::SplitSl { lambda } => {
            if ff.characteristic() == 2 {
                return Err(Error::Unsupported(
                    "SL(2) split data needs odd characteristic; use the GL(2) layer for q = 2"
                        .into(),
                ));
            }
            check_pole(lambda)?;
            if lambda.val_at_infinity() != 0 {
                return Err(Error::InfinityRegularity(
                    "the eigenvalue must be a nonzero unit at infinity".into(),
                ));
            }
            let v = lambda.value_at_infinity(ff)?;
            Some((v.clone(), ff.neg(&v)))
        }
        CharCase::Gl2Split { l1, l2 } => {
            check_pole(l1)?;
            check_pole(l2)?;
            // Values at infinity (zero is fine, coincidence is not).
            let value = |f: &RatFunc| -> crate::Result<Fe> {
                if f.val_at_infinity() > 0 {
                    Ok(ff.zero())
                } else {
                    f.value_at_infinity(ff)
                }
            };
            let v1 = value(l1)?;
            let v2 = value(l2)?;
            if v1 == v2 {
                return Err(Error::InfinityRegularity(
                    "the two eigenvalues coincide at infinity".into(),
                ));
            }
            Some((v1, v2))
        }
        CharCase::Elliptic { c } => {
            if ff.characteristic() == 2 {
                return Err(Error::Unsupported("elliptic data needs odd q".into()));
            }
            if ff.q() != ff.characteristic() {
                return Err(Error::Unsupported(
                    "elliptic data is implemented for prime q".into(),
                ));
            }
            if ff.is_square(c) {
                return Err(Error::Unsupported(
                    "constant must be a nonsquare for an elliptic datum".into(),
                ));
            }
            if !divisor.is_empty() {
                return Err(Error::Unsupported(
                    "elliptic data is implemented for D = 0 (unit discriminant)".into(),
                ));
            }
            None
        }
    };
    Ok(CharDatum {
        ff: ff.clone(),
        divisor,
        case,
        t_order,
    })
}

/// Data at one active place of a split instance: the level n_v and the
/// off-diagonal coset space O/z^n with its unit-square orbit structure.
#[derive(Debug, Clone)]
struct ActivePlace {
    place: Place,
    rf: ResidueField,
    n: i64,
    /// All cosets u in O/z^n, as little-endian coefficient tuples.
    cosets: Vec<Vec<Re>>,
    /// Orbit representatives under u -> w^2 u with their orbit sizes.
    orbits: Vec<(Vec<Re>, u64)>,
}

fn coset_val(rf: &ResidueField, u: &[Re]) -> i64 {
    u.iter()
        .position(|c| !rf.is_zero(c))
        .map(|k| k as i64)
        .unwrap_or(u.len() as i64)
}

fn coset_mul(rf: &ResidueField, a: &[Re], b: &[Re]) -> Vec<Re> {
    let n = a.len();
    let mut out = vec![rf.zero(); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] = rf.add(&out[i + j], &rf.mul(&a[i], &b[j]));
        }
    }
    out
}

fn enumerate_tuples(rf: &ResidueField, n: usize) -> Vec<Vec<Re>> {
    let els = rf.elements();
    let mut out: Vec<Vec<Re>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * els.len());
        for t in &out {
            for c in &els {
                let mut v = t.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl ActivePlace {
    fn new(ff: &FiniteField, place: &Place, n: i64) -> Result<ActivePlace> {
        let rf = local::residue_field(ff, place)?;
        let cosets = enumerate_tuples(&rf, n as usize);
        // Squares of units of O/z^n.
        let mut squares: Vec<Vec<Re>> = Vec::new();
        for w in &cosets {
            if rf.is_zero(&w[0]) {
                continue;
            }
            let s = coset_mul(&rf, w, w);
            if !squares.contains(&s) {
                squares.push(s);
            }
        }
        // Orbits under multiplication by squares.
        let mut seen: Vec<bool> = vec![false; cosets.len()];
        let mut orbits = Vec::new();
        for (i, u) in cosets.iter().enumerate() {
            if seen[i] {
                continue;
            }
            let mut orbit: Vec<Vec<Re>> = Vec::new();
            for s in &squares {
                let v = coset_mul(&rf, s, u);
                if !orbit.contains(&v) {
                    orbit.push(v);
                }
            }
            if orbit.is_empty() {
                orbit.push(u.clone());
            }
            for v in &orbit {
                let idx = cosets.iter().position(|c| c == v).expect("coset closed");
                seen[idx] = true;
            }
            orbits.push((u.clone(), orbit.len() as u64));
        }
        Ok(ActivePlace {
            place: place.clone(),
            rf,
            n,
            cosets,
            orbits,
        })
    }

    /// r = n - val(u), the drop of the lower height at this place.
    fn drop(&self, u: &[Re]) -> i64 {
        self.n - coset_val(&self.rf, u)
    }
}

/// Split-instance scaffolding: the active places (level > 0) of a split
/// characteristic, plus validity checks for every other place.
fn active_places(c: &CharDatum) -> Result<Vec<ActivePlace>> {
    let ff = &c.ff;
    let x = c.x_matrix()?;
    if !x.is_diagonal() {
        return Err(Error::Unsupported(
            "active places exist for split data".into(),
        ));
    }
    let delta = poly::rf_sub(ff, &x.e[0][0], &x.e[1][1])?;
    // Candidate places: divisor support and zeros of delta.
    let mut candidates: Vec<Place> = c.divisor.iter().map(|(p, _)| p.clone()).collect();
    for (pi, _) in poly::factor(ff, &delta.num) {
        if poly::degree(&pi) == Some(0) {
            continue;
        }
        let place = Place::finite(ff, pi)?;
        if !candidates.contains(&place) {
            candidates.push(place);
        }
    }
    candidates.sort();
    let mut out = Vec::new();
    for place in candidates {
        let d = c.d_at(&place);
        let val = delta.val_at(
            ff,
            match &place.kind {
                PlaceKind::Finite(pi) => pi,
                PlaceKind::Infinity => unreachable!("finite candidates only"),
            },
        );
        let n = d as i64 + val;
        if n < 0 {
            // The diagonal itself fails integrality: empty instance.
            return Err(Error::PoleExcess(place.display(ff)));
        }
        if n > 0 {
            out.push(ActivePlace::new(ff, &place, n)?);
        }
    }
    Ok(out)
}

/// Summary of the active places of a split instance: display name, degree,
/// level n_v and the number of off-diagonal cosets enumerated there.
pub fn place_summary(c: &CharDatum) -> Result<Vec<(String, usize, i64, usize)>> {
    let actives = active_places(c)?;
    Ok(actives
        .iter()
        .map(|ap| {
            (
                ap.place.display(&c.ff),
                ap.place.degree,
                ap.n,
                ap.cosets.len(),
            )
        })
        .collect())
}

/// An adelic point: the diagonal global section together with the finitely
/// many nontrivial local classes.
#[derive(Debug, Clone)]
pub struct AdelicPoint {
    pub ff: FiniteField,
    pub classes: Vec<LocalClass>,
}

impl AdelicPoint {
    /// `hp_global`: the degree-weighted sum of local heights for the upper
    /// or lower Borel of SL(2).
    pub fn hp_global(&self, g: &GroupData, p: &Parabolic) -> Result<Vec<Rat>> {
        let upper = Parabolic::new(g, vec![vec![0], vec![1]])?;
        let lower = Parabolic::new(g, vec![vec![1], vec![0]])?;
        let mut total = crate::ratmat::vzero(2);
        for c in &self.classes {
            let h = if *p == upper {
                &c.hb
            } else if *p == lower {
                &c.hbbar
            } else {
                return Err(Error::Unsupported(
                    "heights exist for the two Borels".into(),
                ));
            };
            total = vadd(&total, &vscale(&rat_i(c.place.degree as i64), h));
        }
        Ok(total)
    }

    /// The positive orthogonal family Y_P = -H_P of the point.
    pub fn family(&self, g: &GroupData) -> Result<PositiveOrthogonalFamily> {
        let upper = Parabolic::new(g, vec![vec![0], vec![1]])?;
        let lower = Parabolic::new(g, vec![vec![1], vec![0]])?;
        let mut pts = BTreeMap::new();
        pts.insert(
            upper.clone(),
            crate::ratmat::vneg(&self.hp_global(g, &upper)?),
        );
        pts.insert(
            lower.clone(),
            crate::ratmat::vneg(&self.hp_global(g, &lower)?),
        );
        PositiveOrthogonalFamily::new(g.clone(), torus(g), pts)
    }
}

/// `gl2_bound_check`: the family coefficient satisfies
/// 0 <= x_alpha <= 2 deg(D).
pub fn gl2_bound_check(c: &CharDatum, pt: &AdelicPoint) -> Result<bool> {
    let g = GroupData::new(2)?;
    let fam = pt.family(&g)?;
    let coeffs = validate_family(&fam)?;
    let bound = rat_i(2 * c.deg_divisor());
    Ok(coeffs.values().all(|x| !x.is_negative() && *x <= bound))
}

/// Enumerates adelic points of a split instance: all nontrivial local class
/// combinations at the active places, together with a diagonal class
/// diag(z^A, z^-A) at infinity for |A| <= a_window.
pub fn enumerate_points(c: &CharDatum, a_window: i64) -> Result<Vec<AdelicPoint>> {
    let actives = active_places(c)?;
    let mut combos: Vec<Vec<LocalClass>> = vec![vec![]];
    for ap in &actives {
        let mut next = Vec::new();
        for combo in &combos {
            for u in &ap.cosets {
                let mut cls = combo.clone();
                cls.push(class_from_coset(ap, u));
                next.push(cls);
            }
        }
        combos = next;
    }
    let infty = Place::infinity();
    let mut out = Vec::new();
    for a in -a_window..=a_window {
        for combo in &combos {
            let mut classes = combo.clone();
            if a != 0 {
                classes.push(LocalClass::diagonal(&infty, a));
            }
            out.push(AdelicPoint {
                ff: c.ff.clone(),
                classes,
            });
        }
    }
    Ok(out)
}

/// The local class with Hermite data (a = 0, p = z^{-n} u).
fn class_from_coset(ap: &ActivePlace, u: &[Re]) -> LocalClass {
    let mut p = super::fps::LSeries::zero(0);
    for (k, c) in u.iter().enumerate() {
        p = p.add(
            &ap.rf,
            &super::fps::LSeries::monomial(&ap.rf, c.clone(), k as i64 - ap.n, 0),
        );
    }
    let r = ap.drop(u);
    LocalClass {
        place: ap.place.clone(),
        a: 0,
        p,
        hb: vec![rat_i(0), rat_i(0)],
        hbbar: vec![rat_i(r), rat_i(-r)],
    }
}

/// Weight selections for `orbital_integral`.
#[derive(Debug, Clone)]
pub enum WeightKind {
    /// The hull-volume weight (Arthur weight v_M).
    VM,
    /// The lattice-count weight at a truncation parameter.
    WMXi(Vec<Rat>),
    /// The parabolic-restricted weight, constant 1 in rank one.
    VQ(Parabolic),
    /// The Levi-side integral (over T itself): the plain integrality count.
    VL,
}

/// Value of an orbital integral: a plain rational or a lattice-normalized
/// volume.
#[derive(Debug, Clone)]
pub enum IntegralValue {
    Plain(Rat),
    Normalized(NormalizedScalar),
}

impl IntegralValue {
    pub fn plain(&self) -> Option<&Rat> {
        match self {
            IntegralValue::Plain(r) => Some(r),
            _ => None,
        }
    }
}

/// The family attached to a total drop R at zero diagonal normalization:
/// Y_B = 0, Y_Bbar = (-R, R).
fn drop_family(g: &GroupData, r: i64) -> Result<PositiveOrthogonalFamily> {
    let upper = Parabolic::new(g, vec![vec![0], vec![1]])?;
    let lower = Parabolic::new(g, vec![vec![1], vec![0]])?;
    let mut pts = BTreeMap::new();
    pts.insert(upper, vec![rat_i(0), rat_i(0)]);
    pts.insert(lower, vec![rat_i(-r), rat_i(r)]);
    PositiveOrthogonalFamily::new(g.clone(), torus(g), pts)
}

/// `orbital_integral`: the finite sum over torus orbits of lattice classes
/// of the selected weight, with the Haar normalizations vol(K) = 1 and
/// vol(T(O)) = 1 (each orbit contributes its unit-orbit size as measure).
pub fn orbital_integral(c: &CharDatum, weight: &WeightKind) -> Result<IntegralValue> {
    match &c.case {
        CharCase::Elliptic { .. } => match weight {
            WeightKind::VM => Ok(IntegralValue::Plain(elliptic_plain_integral(c)?)),
            _ => Err(Error::Unsupported(
                "elliptic data supports only the trivial weight (full Levi)".into(),
            )),
        },
        _ => split_orbital_integral(c, weight),
    }
}

fn split_orbital_integral(c: &CharDatum, weight: &WeightKind) -> Result<IntegralValue> {
    if c.ff.characteristic() == 2 {
        if let WeightKind::VM | WeightKind::WMXi(_) = weight {
            return Err(Error::Unsupported(
                "weighted integrals are SL(2)-only (odd q)".into(),
            ));
        }
    }
    let g = GroupData::new(2)?;
    let actives = active_places(c)?;
    match weight {
        WeightKind::VL => {
            // Integral over the torus itself: 1 when X is integral for D,
            // which `active_places` has already certified.
            Ok(IntegralValue::Plain(Rat::one()))
        }
        WeightKind::VQ(_) => {
            // The restricted (T,T)-family weight is constant 1, so the
            // integral counts every orbit with its measure.
            let mut total = Rat::zero();
            for combo in orbit_combos(&actives) {
                total += rat_i(combo.measure as i64);
            }
            Ok(IntegralValue::Plain(total))
        }
        WeightKind::WMXi(xi) => {
            let mut total = Rat::zero();
            for combo in orbit_combos(&actives) {
                let fam = drop_family(&g, combo.total_drop)?;
                let w_direct = w_weight(&fam, xi, Method::Direct)?;
                let w_limit = w_weight(&fam, xi, Method::Limit)?;
                if w_direct != w_limit {
                    return Err(Error::PipelineMismatch(
                        w_direct.to_string(),
                        w_limit.to_string(),
                    ));
                }
                total += rat_i(combo.measure as i64) * rat_i(w_direct as i64);
            }
            Ok(IntegralValue::Plain(total))
        }
        WeightKind::VM => {
            let mut total = Rat::zero();
            let mut reference = None;
            for combo in orbit_combos(&actives) {
                let fam = drop_family(&g, combo.total_drop)?;
                let v_direct = v_weight(&fam, Method::Direct)?;
                let v_limit = v_weight(&fam, Method::Limit)?;
                if !v_direct.eq_exact(&v_limit)? {
                    return Err(Error::PipelineMismatch(
                        v_direct.value.to_string(),
                        v_limit.value.to_string(),
                    ));
                }
                total += rat_i(combo.measure as i64) * v_direct.value.clone();
                reference = Some(v_direct.reference);
            }
            let reference =
                reference.unwrap_or_else(|| cochar_lattice(&g, &torus(&g), LatticeKind::Scnx));
            Ok(IntegralValue::Normalized(NormalizedScalar {
                value: total,
                reference,
            }))
        }
    }
}

/// One torus-orbit combination across the active places.
struct OrbitCombo {
    /// Product of the unit-square orbit sizes (the coset measure).
    measure: u64,
    /// Degree-weighted total drop R.
    total_drop: i64,
}

fn orbit_combos(actives: &[ActivePlace]) -> Vec<OrbitCombo> {
    let mut out = vec![OrbitCombo {
        measure: 1,
        total_drop: 0,
    }];
    for ap in actives {
        let mut next = Vec::with_capacity(out.len() * ap.orbits.len());
        for combo in &out {
            for (u, size) in &ap.orbits {
                next.push(OrbitCombo {
                    measure: combo.measure * size,
                    total_drop: combo.total_drop + ap.place.degree as i64 * ap.drop(u),
                });
            }
        }
        out = next;
    }
    out
}

/// `vol_at`: vol(T_X(F_0) \ T_X(A_0)^1) with vol(T(O)) = 1, computed by
/// bounded divisor-class enumeration over the projective line; the split
/// value is 1/(q-1), the elliptic constant-quadratic value is 1/(q+1).
pub fn vol_at(c: &CharDatum) -> Result<Rat> {
    match &c.case {
        CharCase::Elliptic { c: cc } => elliptic_vol(&c.ff, cc),
        _ => split_vol(&c.ff),
    }
}

fn split_vol(ff: &FiniteField) -> Result<Rat> {
    // Degree-zero divisor classes on P^1 supported in a bounded box, modulo
    // the principal divisors div(pi) = [pi] - deg(pi) [infinity]; the count
    // must stabilize between consecutive boxes.
    let mut counts = Vec::new();
    for bound in [1usize, 2] {
        counts.push(divisor_class_count(ff, bound)?);
    }
    if counts[0] != counts[1] {
        return Err(Error::PipelineMismatch(
            counts[0].to_string(),
            counts[1].to_string(),
        ));
    }
    // Global units are the nonzero constants.
    let units = ff.q() - 1;
    Ok(rat_i(counts[0] as i64) / rat_i(units as i64))
}

fn divisor_class_count(ff: &FiniteField, bound: usize) -> Result<u64> {
    use num::bigint::BigInt;
    // Places of degree <= bound plus infinity; lattice of principal divisor
    // vectors inside the degree-zero lattice.
    let pls = super::places::places(ff, bound);
    let n = pls.len();
    let infty_idx = pls.iter().position(|p| p.is_infinity()).expect("infinity");
    let mut principal: Vec<Vec<BigInt>> = Vec::new();
    for (i, p) in pls.iter().enumerate() {
        if p.is_infinity() {
            continue;
        }
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v[infty_idx] = BigInt::from(-(p.degree as i64));
        principal.push(v);
    }
    // Basis of the degree-zero lattice: [v] - deg(v) [infinity] over finite
    // places... which is exactly the principal set for P^1; the class count
    // is the index of the principal lattice inside it.
    let degree_zero = principal.clone();
    let h_prin = crate::ratmat::hnf_rows(&principal);
    let h_zero = crate::ratmat::hnf_rows(&degree_zero);
    if h_prin.len() != h_zero.len() {
        return Err(Error::DifferentSpans);
    }
    // Index via determinant ratio in a common basis.
    let to_rat = |rows: &Vec<Vec<BigInt>>| -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|x| Rat::from(x.clone())).collect())
            .collect()
    };
    let a = crate::rootdata::LatticeQ::new(to_rat(&h_zero))?;
    let b = crate::rootdata::LatticeQ::new(to_rat(&h_prin))?;
    let idx = covolume_ratio(&b, &a)?;
    if !idx.is_integer() {
        return Err(Error::DifferentSpans);
    }
    Ok(num::ToPrimitive::to_u64(&idx.to_integer()).expect("small class number"))
}

/// The elliptic volume for the constant quadratic extension: the norm-one
/// idele class count (stabilized over boxes) divided by the order of the
/// group of norm-one constants.
fn elliptic_vol(ff: &FiniteField, c: &Fe) -> Result<Rat> {
    let p = ff.characteristic();
    let ext = FiniteField::new_internal(p, 2)?;
    // Norm-one constants: x^(p+1) = 1 in F_{p^2}.
    let mut stab = 0u64;
    for x in ext.elements() {
        if !ext.is_zero(&x) && ext.pow(&x, p + 1) == ext.one() {
            stab += 1;
        }
    }
    let mut counts = Vec::new();
    for bound in [2usize, 3] {
        counts.push(elliptic_class_count(ff, &ext, c, bound)?);
    }
    if counts[0] != counts[1] {
        return Err(Error::PipelineMismatch(
            counts[0].to_string(),
            counts[1].to_string(),
        ));
    }
    Ok(rat_i(counts[0] as i64) / rat_i(stab as i64))
}

/// Classes of the norm-one idele group supported on split places of degree
/// <= bound, modulo the global norm-one elements pi1/pi2.
fn elliptic_class_count(ff: &FiniteField, ext: &FiniteField, c: &Fe, bound: usize) -> Result<u64> {
    use num::bigint::BigInt;
    let mut split_places = Vec::new();
    for place in super::places::places(ff, bound) {
        if place.is_infinity() {
            continue; // infinity has odd degree 1: inert for nonsquare c
        }
        let PlaceKind::Finite(pi) = &place.kind else {
            continue;
        };
        let rf = ResidueField::new(ff, pi)?;
        if rf.is_square(&rf.embed_base(c)) {
            split_places.push(place.clone());
        }
    }
    if split_places.is_empty() {
        return Ok(1);
    }
    // For each split place, factor pi over F_{p^2} into two conjugate
    // halves; the norm-one element pi1/pi2 has valuation vector +-1 at this
    // place and 0 elsewhere, which is verified by the coprimality check.
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    for (i, place) in split_places.iter().enumerate() {
        let PlaceKind::Finite(pi) = &place.kind else {
            unreachable!();
        };
        let (p1, p2) = factor_over_quadratic(ff, ext, pi)?;
        let prod = poly::mul(ext, &p1, &p2);
        let lifted: poly::Poly = pi.iter().map(|ce| lift_base(ext, ce)).collect();
        if poly::normalize(ext, prod) != poly::normalize(ext, lifted) || p1 == p2 {
            return Err(Error::NotIrreducible);
        }
        let g = poly::gcd(ext, &p1, &p2);
        if poly::degree(&g) != Some(0) {
            return Err(Error::NotIrreducible);
        }
        let mut v = vec![BigInt::zero(); split_places.len()];
        v[i] = BigInt::one();
        relations.push(v);
    }
    // Quotient of Z^{split} by the relation lattice.
    let full: Vec<Vec<BigInt>> = (0..split_places.len())
        .map(|i| {
            (0..split_places.len())
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let to_rat = |rows: &Vec<Vec<BigInt>>| -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|x| Rat::from(x.clone())).collect())
            .collect()
    };
    let h_rel = crate::ratmat::hnf_rows(&relations);
    let a = crate::rootdata::LatticeQ::new(to_rat(&full))?;
    let b = crate::rootdata::LatticeQ::new(to_rat(&h_rel))?;
    let idx = covolume_ratio(&b, &a)?;
    Ok(num::ToPrimitive::to_u64(&idx.to_integer()).expect("small class number"))
}

fn lift_base(ext: &FiniteField, c: &Fe) -> Fe {
    // The base field is F_p (prime), embedded as constants.
    ext.from_int(c[0] as i64)
}

/// Factors an even-degree monic irreducible of F_p[t] into its two conjugate
/// halves over F_{p^2}, by trial division over the extension.
fn factor_over_quadratic(
    _ff: &FiniteField,
    ext: &FiniteField,
    pi: &poly::Poly,
) -> Result<(poly::Poly, poly::Poly)> {
    let d = poly::degree(pi).ok_or(Error::NotIrreducible)?;
    if d % 2 != 0 {
        return Err(Error::NotIrreducible);
    }
    let lifted: poly::Poly = pi.iter().map(|c| lift_base(ext, c)).collect();
    let lifted = poly::normalize(ext, lifted);
    for cand in poly::monic_of_degree(ext, d / 2) {
        let (q, r) = poly::divrem(ext, &lifted, &cand)?;
        if r.is_empty() {
            return Ok((cand, q));
        }
    }
    Err(Error::NotIrreducible)
}

/// The elliptic plain orbital integral for D = 0: every local set is a
/// single torus orbit of measure one, verified place by place in a bounded
/// window, so the integral is 1.
fn elliptic_plain_integral(c: &CharDatum) -> Result<Rat> {
    let ff = &c.ff;
    let x = c.x_matrix()?;
    // Verify single-orbit structure at every place of degree <= 2: inert
    // places carry exactly the trivial class; split places carry one
    // diagonal-translate family (2|a|window+1 classes in a window, all in
    // one torus orbit).
    for place in super::places::places(ff, 2) {
        let w = local::certified_window(ff, &x, &place, 0);
        let classes = local_springer(ff, &x, &place, 0, w)?;
        let PlaceKind::Finite(pi) = &place.kind else {
            // Infinity is inert (odd degree) for a constant nonsquare.
            if classes.len() != 1 {
                return Err(Error::PipelineMismatch(
                    classes.len().to_string(),
                    "1".into(),
                ));
            }
            continue;
        };
        let rf = ResidueField::new(ff, pi)?;
        let CharCase::Elliptic { c: cc } = &c.case else {
            unreachable!();
        };
        let split_here = rf.is_square(&rf.embed_base(cc));
        let expected = if split_here { 2 * w + 1 } else { 1 };
        if classes.len() as i64 != expected {
            return Err(Error::PipelineMismatch(
                classes.len().to_string(),
                expected.to_string(),
            ));
        }
    }
    Ok(Rat::one())
}

/// `fiber_count_direct`: the groupoid cardinality from the double-coset
/// description: enumerate torus-orbit normal forms (diagonal degree at
/// infinity, off-diagonal cosets at the active places modulo the global
/// constant-square action) and sum the reciprocal stabilizer orders.
pub fn fiber_count_direct(c: &CharDatum, xi: &[Rat]) -> Result<Rat> {
    let g = GroupData::new(2)?;
    g.check_ambient(xi)?;
    if !is_general_position(&g, xi)? {
        return Err(Error::NotGeneralPosition);
    }
    match &c.case {
        CharCase::Elliptic { .. } => {
            // Condition (d) is vacuous for the full Levi; the class set is
            // the norm-one divisor class group and every stabilizer is the
            // norm-one constant group.
            let CharCase::Elliptic { c: cc } = &c.case else {
                unreachable!();
            };
            let _ = elliptic_plain_integral(c)?;
            let ext = FiniteField::new_internal(c.ff.characteristic(), 2)?;
            let mut stab = 0i64;
            let p = c.ff.characteristic();
            for x in ext.elements() {
                if !ext.is_zero(&x) && ext.pow(&x, p + 1) == ext.one() {
                    stab += 1;
                }
            }
            let classes = elliptic_class_count(&c.ff, &ext, cc, 2)?;
            let classes3 = elliptic_class_count(&c.ff, &ext, cc, 3)?;
            if classes != classes3 {
                return Err(Error::PipelineMismatch(
                    classes.to_string(),
                    classes3.to_string(),
                ));
            }
            Ok(rat_i(classes as i64) / rat_i(stab))
        }
        CharCase::Gl2Split { .. } => Err(Error::Unsupported(
            "fiber counts are SL(2)-only; q = 2 supports only the bound layer".into(),
        )),
        CharCase::SplitSl { .. } => {
            let actives = active_places(c)?;
            let ff = &c.ff;
            let q = ff.q() as i64;
            // xi = (s, -s).
            let s = xi[0].clone();
            // Global constant squares acting diagonally on the cosets.
            let mut sq_consts: Vec<Fe> = Vec::new();
            for cc in ff.elements() {
                if !ff.is_zero(&cc) {
                    let s2 = ff.mul(&cc, &cc);
                    if !sq_consts.contains(&s2) {
                        sq_consts.push(s2);
                    }
                }
            }
            // Enumerate tuples of cosets, keep canonical representatives.
            let mut tuples: Vec<Vec<Vec<Re>>> = vec![vec![]];
            for ap in &actives {
                let mut next = Vec::new();
                for t in &tuples {
                    for u in &ap.cosets {
                        let mut v = t.clone();
                        v.push(u.clone());
                        next.push(v);
                    }
                }
                tuples = next;
            }
            let mut total = Rat::zero();
            // Square roots of unity in the field (2 in odd characteristic).
            let mu2 = ff
                .elements()
                .iter()
                .filter(|x| !ff.is_zero(x) && ff.mul(x, x) == ff.one())
                .count() as i64;
            for t in &tuples {
                // Canonicity under the diagonal square scaling.
                let mut orbit: Vec<Vec<Vec<Re>>> = Vec::new();
                for s2 in &sq_consts {
                    let scaled: Vec<Vec<Re>> = t
                        .iter()
                        .zip(actives.iter())
                        .map(|(u, ap)| {
                            let c_emb = ap.rf.embed_base(s2);
                            u.iter().map(|ce| ap.rf.mul(&c_emb, ce)).collect()
                        })
                        .collect();
                    if !orbit.contains(&scaled) {
                        orbit.push(scaled);
                    }
                }
                if orbit.iter().min() != Some(t) {
                    continue;
                }
                let all_zero = t
                    .iter()
                    .zip(actives.iter())
                    .all(|(u, ap)| coset_val(&ap.rf, u) >= ap.n);
                let stab = if all_zero { q - 1 } else { mu2 };
                let r: i64 = t
                    .iter()
                    .zip(actives.iter())
                    .map(|(u, ap)| ap.place.degree as i64 * ap.drop(u))
                    .sum();
                // Number of integers A with s <= A <= s + R.
                let num_a = (&s + rat_i(r)).floor().to_integer() - s.ceil().to_integer() + 1;
                let num_a = Rat::from(num_a);
                total += num_a / rat_i(stab);
            }
            Ok(total)
        }
    }
}

/// `fiber_count_formula`: the weighted-orbital-integral expression, computed
/// in both the lattice-count form vol(a,t) J^xi and the volume form
/// vol(a_M/X_*(M))^{-1} vol(a,t) J^G; the two must agree exactly.
pub fn fiber_count_formula(c: &CharDatum, xi: &[Rat]) -> Result<Rat> {
    let g = GroupData::new(2)?;
    g.check_ambient(xi)?;
    if !is_general_position(&g, xi)? {
        return Err(Error::NotGeneralPosition);
    }
    let vol = vol_at(c)?;
    match &c.case {
        CharCase::Elliptic { .. } => {
            let j = elliptic_plain_integral(c)?;
            Ok(vol * j)
        }
        CharCase::Gl2Split { .. } => Err(Error::Unsupported(
            "fiber counts are SL(2)-only; q = 2 supports only the bound layer".into(),
        )),
        CharCase::SplitSl { .. } => {
            let IntegralValue::Plain(jxi) = orbital_integral(c, &WeightKind::WMXi(xi.to_vec()))?
            else {
                unreachable!("lattice-count weight is plain");
            };
            let IntegralValue::Normalized(jg) = orbital_integral(c, &WeightKind::VM)? else {
                unreachable!("volume weight is normalized");
            };
            let w_form = vol.clone() * jxi;
            // vol(a_M / X_*(M))^{-1} * value * covol(reference).
            let t_levi = torus(&g);
            let full = cochar_lattice(&g, &t_levi, LatticeKind::Full);
            let ratio = covolume_ratio(&jg.reference, &full)?;
            let v_form = vol * jg.value * ratio;
            if w_form != v_form {
                return Err(Error::PipelineMismatch(
                    w_form.to_string(),
                    v_form.to_string(),
                ));
            }
            Ok(w_form)
        }
    }
}

/// `descent_check`: the parabolic-restricted integral against
/// q^{dim(n_Q) deg(D_0)} times the Levi-side integral, plus the Iwasawa
/// spot check v^Q(g) = v^T(l_Q(g)) on enumerated classes (returned count).
pub fn descent_check(c: &CharDatum, q_parab: &Parabolic) -> Result<(Rat, Rat, usize)> {
    if q_parab.num_blocks() != 2 {
        return Err(Error::Unsupported(
            "descent needs a proper parabolic".into(),
        ));
    }
    let IntegralValue::Plain(lhs) = orbital_integral(c, &WeightKind::VQ(q_parab.clone()))? else {
        unreachable!();
    };
    let IntegralValue::Plain(jt) = orbital_integral(c, &WeightKind::VL)? else {
        unreachable!();
    };
    // dim(n_Q) = 1 for either Borel of SL(2).
    let mut factor = Rat::one();
    for _ in 0..c.deg_divisor() {
        factor *= rat_i(c.ff.q() as i64);
    }
    let rhs = factor * jt;
    // Spot check of the Iwasawa Levi part on enumerated classes: the cached
    // heights must match an honest re-extraction from the representative.
    let mut checked = 0usize;
    for pt in enumerate_points(c, 1)? {
        for cls in &pt.classes {
            let rf = local::residue_field(&c.ff, &cls.place)?;
            let rep = cls.rep(&rf, 8 + cls.a.abs());
            if iwasawa_height_upper(&rep)? != cls.hb || iwasawa_height_lower(&rep)? != cls.hbbar {
                return Err(Error::PipelineMismatch(
                    "iwasawa heights".into(),
                    "cached heights".into(),
                ));
            }
            checked += 1;
        }
    }
    Ok((lhs, rhs, checked))
}

impl FiniteField {
    /// Internal extension fields (beyond the public q <= 9 bound) used for
    /// the quadratic constant-field extension in elliptic computations.
    pub fn new_internal(p: u64, k: usize) -> Result<FiniteField> {
        FiniteField::new_with_degree(p, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adelic::poly::parse_ratfunc;
    use crate::ratmat::rat;

    fn split_instance(q: u64, d: &[(&str, u32)], lambda: &str) -> CharDatum {
        let ff = FiniteField::new(q).unwrap();
        let divisor = d
            .iter()
            .map(|(s, m)| {
                (
                    Place::finite(&ff, parse_ratfunc(&ff, s).unwrap().num).unwrap(),
                    *m,
                )
            })
            .collect();
        let lambda = parse_ratfunc(&ff, lambda).unwrap();
        build_char(&ff, divisor, CharCase::SplitSl { lambda }).unwrap()
    }

    fn xi_half() -> Vec<Rat> {
        vec![rat(1, 2), rat(-1, 2)]
    }

    #[test]
    fn build_char_validations() {
        let ff = FiniteField::new(3).unwrap();
        // lambda = 1/t vanishes at infinity: regularity failure.
        let t = Place::finite(&ff, parse_ratfunc(&ff, "t").unwrap().num).unwrap();
        let lam = parse_ratfunc(&ff, "1/t").unwrap();
        assert!(matches!(
            build_char(&ff, vec![(t.clone(), 1)], CharCase::SplitSl { lambda: lam }),
            Err(Error::InfinityRegularity(_))
        ));
        // Pole excess.
        let lam2 = parse_ratfunc(&ff, "(t+1)/t^2").unwrap();
        assert!(matches!(
            build_char(
                &ff,
                vec![(t.clone(), 1)],
                CharCase::SplitSl { lambda: lam2 }
            ),
            Err(Error::PoleExcess(_))
        ));
        // Valid instance.
        let c = split_instance(3, &[("t", 1)], "(t+1)/t");
        assert!(c.is_split());
        assert_eq!(c.deg_divisor(), 1);
        // Elliptic: c = 2 is a nonsquare mod 3.
        let e = build_char(&ff, vec![], CharCase::Elliptic { c: ff.from_int(2) }).unwrap();
        assert!(!e.is_split());
        // A square constant is rejected.
        assert!(build_char(&ff, vec![], CharCase::Elliptic { c: ff.from_int(1) }).is_err());
    }

    #[test]
    fn volume_oracle() {
        let c3 = split_instance(3, &[("t", 1)], "(t+1)/t");
        assert_eq!(vol_at(&c3).unwrap(), rat(1, 2));
        let c5 = split_instance(5, &[("t", 1)], "(t+1)/t");
        assert_eq!(vol_at(&c5).unwrap(), rat(1, 4));
        let ff = FiniteField::new(3).unwrap();
        let e = build_char(&ff, vec![], CharCase::Elliptic { c: ff.from_int(2) }).unwrap();
        assert_eq!(vol_at(&e).unwrap(), rat(1, 4)); // 1/(q+1)
    }

    #[test]
    fn q3_instance_counts() {
        let c = split_instance(3, &[("t", 1)], "(t+1)/t");
        let xi = xi_half();
        let direct = fiber_count_direct(&c, &xi).unwrap();
        let formula = fiber_count_formula(&c, &xi).unwrap();
        assert_eq!(direct, formula);
        assert_eq!(direct, rat_i(1)); // frozen regression value
    }

    #[test]
    fn descent_examples() {
        let g = GroupData::new(2).unwrap();
        let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        // D = 0: factor q^0 = 1 (constant eigenvalue, unit discriminant).
        let c0 = split_instance(3, &[], "1");
        let (lhs, rhs, _) = descent_check(&c0, &b).unwrap();
        assert_eq!(lhs, rhs);
        // q = 2 GL(2) layer, D = (t): factor 2. The second eigenvalue
        // vanishes at infinity, which keeps the roots there distinct.
        let ff2 = FiniteField::new(2).unwrap();
        let t = Place::finite(&ff2, parse_ratfunc(&ff2, "t").unwrap().num).unwrap();
        let l1 = parse_ratfunc(&ff2, "(t+1)/t").unwrap();
        let l2 = parse_ratfunc(&ff2, "1/t").unwrap();
        let c2 = build_char(&ff2, vec![(t, 1)], CharCase::Gl2Split { l1, l2 }).unwrap();
        let (lhs2, rhs2, checked) = descent_check(&c2, &b).unwrap();
        assert_eq!(lhs2, rhs2);
        assert_eq!(lhs2, rat_i(2));
        assert!(checked > 0);
    }

    #[test]
    fn elliptic_count() {
        let ff = FiniteField::new(3).unwrap();
        let e = build_char(&ff, vec![], CharCase::Elliptic { c: ff.from_int(2) }).unwrap();
        let xi = xi_half();
        let d = fiber_count_direct(&e, &xi).unwrap();
        let f = fiber_count_formula(&e, &xi).unwrap();
        assert_eq!(d, f);
        assert_eq!(d, rat(1, 4));
    }
}

#[cfg(test)]
mod point_tests {
    use super::*;
    use crate::adelic::poly::parse_ratfunc;

    #[test]
    fn hp_global_examples() {
        let ff = FiniteField::new(3).unwrap();
        let g = GroupData::new(2).unwrap();
        let upper = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        let lower = Parabolic::new(&g, vec![vec![1], vec![0]]).unwrap();
        // All trivial classes: zero heights.
        let pt = AdelicPoint {
            ff: ff.clone(),
            classes: vec![],
        };
        assert!(crate::ratmat::is_zero_vec(
            &pt.hp_global(&g, &upper).unwrap()
        ));
        // A single diag(z, z^-1) at a degree-one place: H_B = -(1,-1).
        let t = Place::finite(&ff, parse_ratfunc(&ff, "t").unwrap().num).unwrap();
        let pt = AdelicPoint {
            ff: ff.clone(),
            classes: vec![LocalClass::diagonal(&t, 1)],
        };
        assert_eq!(pt.hp_global(&g, &upper).unwrap(), vec![rat_i(-1), rat_i(1)]);
        assert_eq!(pt.hp_global(&g, &lower).unwrap(), vec![rat_i(-1), rat_i(1)]);
        // Degree weighting: the same class at a degree-two place doubles.
        let q2 = Place::finite(&ff, parse_ratfunc(&ff, "t^2+1").unwrap().num).unwrap();
        let pt2 = AdelicPoint {
            ff: ff.clone(),
            classes: vec![LocalClass::diagonal(&q2, 1)],
        };
        assert_eq!(
            pt2.hp_global(&g, &upper).unwrap(),
            vec![rat_i(-2), rat_i(2)]
        );
        // The assembled family of an enumerated point is positive orthogonal.
        let c = {
            let lambda = parse_ratfunc(&ff, "(t+1)/t").unwrap();
            let tp = Place::finite(&ff, parse_ratfunc(&ff, "t").unwrap().num).unwrap();
            build_char(&ff, vec![(tp, 1)], CharCase::SplitSl { lambda }).unwrap()
        };
        for pt in enumerate_points(&c, 1).unwrap() {
            let fam = pt.family(&g).unwrap();
            crate::polytope::validate_family(&fam).unwrap();
        }
    }

    #[test]
    fn formula_rejects_non_general_position() {
        let ff = FiniteField::new(3).unwrap();
        let t = Place::finite(&ff, parse_ratfunc(&ff, "t").unwrap().num).unwrap();
        let lambda = parse_ratfunc(&ff, "(t+1)/t").unwrap();
        let c = build_char(&ff, vec![(t, 1)], CharCase::SplitSl { lambda }).unwrap();
        let integral_xi = vec![rat_i(1), rat_i(-1)];
        assert!(matches!(
            fiber_count_direct(&c, &integral_xi),
            Err(Error::NotGeneralPosition)
        ));
        assert!(matches!(
            fiber_count_formula(&c, &integral_xi),
            Err(Error::NotGeneralPosition)
        ));
    }
}

#[cfg(test)]
mod trivial_weight_tests {
    use super::*;
    use crate::adelic::poly::parse_ratfunc;

    #[test]
    fn unit_eigenvalue_gives_zero_volume_weight() {
        // lambda constant: every local set is torus-trivial, the hull is a
        // point, and the volume-weighted integral vanishes.
        let ff = FiniteField::new(3).unwrap();
        let lambda = parse_ratfunc(&ff, "1").unwrap();
        let c = build_char(&ff, vec![], CharCase::SplitSl { lambda }).unwrap();
        match orbital_integral(&c, &WeightKind::VM).unwrap() {
            IntegralValue::Normalized(ns) => assert!(ns.value.is_zero()),
            _ => panic!("volume weight is normalized"),
        }
        // The fiber count is 0 at general position (no lattice point in a
        // point hull off the lattice).
        let xi = vec![crate::ratmat::rat(1, 2), crate::ratmat::rat(-1, 2)];
        assert_eq!(fiber_count_direct(&c, &xi).unwrap(), Rat::zero());
        assert_eq!(fiber_count_formula(&c, &xi).unwrap(), Rat::zero());
    }
}

#[cfg(test)]
mod elliptic_larger_base_tests {
    use super::*;
    use crate::ratmat::rat;

    #[test]
    fn elliptic_counts_for_larger_prime_bases() {
        // Constant-field quadratic data over F_5 and F_7: the volume and
        // the count are 1/(q+1), through the internal quadratic extension.
        for (q, csq) in [(5u64, 2i64), (7, 3)] {
            let ff = FiniteField::new(q).unwrap();
            let c_elt = ff.from_int(csq);
            assert!(!ff.is_square(&c_elt));
            let e = build_char(&ff, vec![], CharCase::Elliptic { c: c_elt }).unwrap();
            let expect = rat(1, q as i64 + 1);
            assert_eq!(vol_at(&e).unwrap(), expect);
            let xi = vec![rat(1, 2), rat(-1, 2)];
            assert_eq!(fiber_count_direct(&e, &xi).unwrap(), expect);
            assert_eq!(fiber_count_formula(&e, &xi).unwrap(), expect);
        }
    }
}

#[cfg(test)]
mod prime_power_base_tests {
    use super::*;
    use crate::adelic::poly::parse_ratfunc;
    use crate::ratmat::rat;

    #[test]
    fn q9_split_instance_counts() {
        // Base field F_9: the constant-square action on cosets is a genuine
        // index-two action, unlike the prime cases computed elsewhere.
        let ff = FiniteField::new(9).unwrap();
        let t = Place::finite(&ff, parse_ratfunc(&ff, "t").unwrap().num).unwrap();
        let lambda = parse_ratfunc(&ff, "(t+1)/t").unwrap();
        let c = build_char(&ff, vec![(t, 1)], CharCase::SplitSl { lambda }).unwrap();
        assert_eq!(vol_at(&c).unwrap(), rat(1, 8));
        let xi = vec![rat(1, 2), rat(-1, 2)];
        let direct = fiber_count_direct(&c, &xi).unwrap();
        let formula = fiber_count_formula(&c, &xi).unwrap();
        assert_eq!(direct, formula);
        // Orbits of F_9 under multiplication by squares: {0} and two orbits
        // of size 4; each nonzero orbit contributes 1/2, so the count is 1.
        assert_eq!(direct, rat_i(1));
    }
}
