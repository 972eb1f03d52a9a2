//! Arthur-style weight functions computed two independent ways: the lattice
//! count w and the hull volume v, each obtainable directly from the convex
//! hull of a positive orthogonal family or as the value at zero of a
//! singular sum over parabolic-indexed smooth functions evaluated along a
//! generic direction. Volume-bearing scalars carry an explicit reference
//! lattice so that every comparison stays rational.

use crate::polytope::{hull_member, PositiveOrthogonalFamily};
use crate::ratmat::{dot, rat_i, vadd, vscale, vsub, Rat};
use crate::rootdata::{
    cochar_lattice, covolume_ratio, p_of, project_levi, root_bases, GroupData, LatticeKind,
    LatticeQ, Levi, Parabolic, ProjPart,
};
use crate::series::{exp_linear, SeriesQ};
use crate::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A rational multiple of the covolume of a reference lattice. Two scalars
/// compare only after conversion to a common reference, which is possible
/// exactly when the references span the same subspace.
#[derive(Debug, Clone)]
pub struct NormalizedScalar {
    pub value: Rat,
    pub reference: LatticeQ,
}

impl NormalizedScalar {
    pub fn convert_to(&self, reference: &LatticeQ) -> Result<NormalizedScalar> {
        let r = covolume_ratio(&self.reference, reference)?;
        Ok(NormalizedScalar {
            value: &self.value * r,
            reference: reference.clone(),
        })
    }

    pub fn eq_exact(&self, other: &NormalizedScalar) -> Result<bool> {
        Ok(self.convert_to(&other.reference)?.value == other.value)
    }
}

/// Which cocharacter lattice a formal covolume factor refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TagKind {
    Full,
    Scnx,
}

/// A rational number times a formal product of lattice covolumes,
/// prod covol(X_*(levi, kind))^exp. Comparisons canonicalize every factor to
/// the full cocharacter lattice of its Levi, which only introduces rational
/// covolume ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledRat {
    pub value: Rat,
    pub tag: BTreeMap<(Levi, TagKind), i64>,
}

impl ScaledRat {
    pub fn pure(value: Rat) -> ScaledRat {
        ScaledRat {
            value,
            tag: BTreeMap::new(),
        }
    }

    pub fn with_tag(value: Rat, levi: Levi, kind: TagKind, exp: i64) -> ScaledRat {
        let mut tag = BTreeMap::new();
        if exp != 0 {
            tag.insert((levi, kind), exp);
        }
        ScaledRat { value, tag }
    }

    pub fn mul(&self, other: &ScaledRat) -> ScaledRat {
        let mut tag = self.tag.clone();
        for (k, e) in &other.tag {
            let entry = tag.entry(k.clone()).or_insert(0);
            *entry += e;
            if *entry == 0 {
                tag.remove(k);
            }
        }
        ScaledRat {
            value: &self.value * &other.value,
            tag,
        }
    }

    /// Rewrites every covolume factor over the full cocharacter lattice of
    /// its Levi; rank-zero references are the convention covol = 1 and drop.
    pub fn canonicalize(&self, g: &GroupData) -> Result<ScaledRat> {
        let mut value = self.value.clone();
        let mut tag: BTreeMap<(Levi, TagKind), i64> = BTreeMap::new();
        for ((levi, kind), e) in &self.tag {
            let full = cochar_lattice(g, levi, LatticeKind::Full);
            if full.rank() == 0 {
                continue;
            }
            if *kind == TagKind::Scnx {
                let scnx = cochar_lattice(g, levi, LatticeKind::Scnx);
                let r = covolume_ratio(&scnx, &full)?;
                value *= pow_rat(&r, *e);
            }
            let entry = tag.entry((levi.clone(), TagKind::Full)).or_insert(0);
            *entry += e;
            if *entry == 0 {
                tag.remove(&(levi.clone(), TagKind::Full));
            }
        }
        Ok(ScaledRat { value, tag })
    }

    pub fn eq_exact(&self, other: &ScaledRat, g: &GroupData) -> Result<bool> {
        let a = self.canonicalize(g)?;
        let b = other.canonicalize(g)?;
        Ok(a.value == b.value && a.tag == b.tag)
    }
}

fn pow_rat(r: &Rat, e: i64) -> Rat {
    let mut out = Rat::one();
    for _ in 0..e.unsigned_abs() {
        out *= r.clone();
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

/// `floor_decompose`: mu = [mu]_P + {mu}_P with the integral part in the
/// coroot lattice of P and fractional coefficients in [0, 1).
pub fn floor_decompose(g: &GroupData, mu: &[Rat], p: &Parabolic) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let coroots = root_bases(g, p).simple_coroots;
    let coords = crate::ratmat::express_in_basis(&coroots, mu).ok_or(Error::NotInSpan)?;
    let mut integral = crate::ratmat::vzero(g.n());
    let mut fractional = crate::ratmat::vzero(g.n());
    for (c, a) in coords.iter().zip(coroots.iter()) {
        let fl = c.floor();
        integral = vadd(&integral, &vscale(&fl, a));
        fractional = vadd(&fractional, &vscale(&(c - &fl), a));
    }
    Ok((integral, fractional))
}

/// The integral part in the upper-half-open convention: fractional
/// coefficients in (0, 1], so an integral coefficient c contributes c - 1.
/// This is the convention under which the geometric series behind the limit
/// formula matches the closed-hull count on lattice boundaries as well; off
/// the boundary it agrees with `floor_decompose`.
fn integral_part_upper(g: &GroupData, mu: &[Rat], p: &Parabolic) -> Result<Vec<Rat>> {
    let coroots = root_bases(g, p).simple_coroots;
    let coords = crate::ratmat::express_in_basis(&coroots, mu).ok_or(Error::NotInSpan)?;
    let mut integral = crate::ratmat::vzero(g.n());
    for (c, a) in coords.iter().zip(coroots.iter()) {
        let fl = if c.is_integer() {
            c - Rat::one()
        } else {
            c.floor()
        };
        integral = vadd(&integral, &vscale(&fl, a));
    }
    Ok(integral)
}

fn check_generic_for(g: &GroupData, p: &Parabolic, lam0: &[Rat]) -> Result<()> {
    for a in root_bases(g, p).simple_coroots {
        if dot(lam0, &a).is_zero() {
            return Err(Error::NonGenericDirection(format!(
                "direction vanishes on a coroot of {p}"
            )));
        }
    }
    Ok(())
}

/// `cP_series`: the product over the coroots of P of (exp(t L0(a)) - 1);
/// valuation equals the number of coroots. Requires L0 generic for P.
pub fn cp_series(g: &GroupData, p: &Parabolic, lam0: &[Rat], order: i64) -> Result<SeriesQ> {
    check_generic_for(g, p, lam0)?;
    let k = p.num_blocks() as i64 - 1;
    let mut out = SeriesQ::constant(Rat::one(), order + k);
    for a in root_bases(g, p).simple_coroots {
        let c = dot(lam0, &a);
        let f = exp_linear(&c, order + k).sub(&SeriesQ::constant(Rat::one(), order + k));
        out = out.mul(&f);
    }
    Ok(out.truncate_to(order + k))
}

/// `dP_series`: the monomial prod_a t L0(a), together with the symbolic
/// covolume factor covol(X_*(M_scnx))^{-1} it carries.
pub fn dp_series(
    g: &GroupData,
    p: &Parabolic,
    lam0: &[Rat],
    order: i64,
) -> Result<(SeriesQ, ScaledRat)> {
    check_generic_for(g, p, lam0)?;
    let k = p.num_blocks() as i64 - 1;
    let mut c = Rat::one();
    for a in root_bases(g, p).simple_coroots {
        c *= dot(lam0, &a);
    }
    // For the full group the covolume convention is 1 and no tag is carried.
    let tag = if k == 0 {
        ScaledRat::pure(Rat::one())
    } else {
        ScaledRat::with_tag(Rat::one(), p.levi(), TagKind::Scnx, -1)
    };
    Ok((SeriesQ::monomial(c, k, order + k), tag))
}

/// One member function of a parabolic-indexed family, evaluated at t L0 as a
/// truncated series, together with its formal covolume factor.
#[derive(Debug, Clone)]
pub struct Member {
    pub series: SeriesQ,
    pub tag: BTreeMap<(Levi, TagKind), i64>,
}

/// A parabolic-indexed family of smooth functions agreeing on adjacency
/// walls, evaluated along rational directions as truncated series.
pub trait GmFamily {
    fn group(&self) -> &GroupData;
    fn levi(&self) -> &Levi;
    fn member(&self, p: &Parabolic, lam0: &[Rat], order: i64) -> Result<Member>;
}

/// `v_family`: members exp(t L0(Y_P)); smooth in every direction.
pub struct VFamily {
    fam: PositiveOrthogonalFamily,
}

pub fn v_family(f: &PositiveOrthogonalFamily) -> VFamily {
    VFamily { fam: f.clone() }
}

impl GmFamily for VFamily {
    fn group(&self) -> &GroupData {
        self.fam.group()
    }

    fn levi(&self) -> &Levi {
        self.fam.levi()
    }

    fn member(&self, p: &Parabolic, lam0: &[Rat], order: i64) -> Result<Member> {
        // v_P(g, L) = exp(-L(H_P(g))) and Y_P = -H_P(g).
        let c = dot(lam0, self.fam.point(p));
        Ok(Member {
            series: exp_linear(&c, order),
            tag: BTreeMap::new(),
        })
    }
}

/// `w_family`: members (d_P/c_P)(t L0) exp(-t L0([mu]_P)). The ratio d_P/c_P
/// is assembled factor by factor through the smooth kernel x/(exp(x)-1), so
/// members are well defined on adjacency walls as the recollement requires.
pub struct WFamily {
    group: GroupData,
    levi: Levi,
    mu: Vec<Rat>,
}

pub fn w_family(g: &GroupData, mu: &[Rat], m: &Levi) -> Result<WFamily> {
    g.check_ambient(mu)?;
    let proj = project_levi(g, mu, m, ProjPart::OntoLevi)?;
    if proj != mu.to_vec() {
        return Err(Error::NotInAmbient("mu must lie in a_M".into()));
    }
    Ok(WFamily {
        group: g.clone(),
        levi: m.clone(),
        mu: mu.to_vec(),
    })
}

impl GmFamily for WFamily {
    fn group(&self) -> &GroupData {
        &self.group
    }

    fn levi(&self) -> &Levi {
        &self.levi
    }

    fn member(&self, p: &Parabolic, lam0: &[Rat], order: i64) -> Result<Member> {
        let mut series = SeriesQ::constant(Rat::one(), order);
        for a in root_bases(&self.group, p).simple_coroots {
            let c = dot(lam0, &a);
            if c.is_zero() {
                continue; // kernel x/(exp(x)-1) -> 1 on the wall
            }
            // (exp(ct) - 1)/(ct), inverted: constant term 1, so invertible.
            let em1 = exp_linear(&c, order + 1)
                .sub(&SeriesQ::constant(Rat::one(), order + 1))
                .shift(-1)
                .scale(&c.clone().recip());
            series = series.mul(&em1.inverse()?).truncate_to(order);
        }
        let integral = integral_part_upper(&self.group, &self.mu, p)?;
        let c = -dot(lam0, &integral);
        series = series.mul(&exp_linear(&c, order)).truncate_to(order);
        let mut tag = BTreeMap::new();
        if self.levi.num_blocks() > 1 {
            tag.insert((self.levi.clone(), TagKind::Scnx), -1);
        }
        Ok(Member { series, tag })
    }
}

/// Pointwise product of two families over the same Levi.
pub struct ProductFamily<'a> {
    a: &'a dyn GmFamily,
    b: &'a dyn GmFamily,
}

pub fn product_family<'a>(a: &'a dyn GmFamily, b: &'a dyn GmFamily) -> Result<ProductFamily<'a>> {
    if a.levi() != b.levi() {
        return Err(Error::DifferentLevis);
    }
    Ok(ProductFamily { a, b })
}

impl GmFamily for ProductFamily<'_> {
    fn group(&self) -> &GroupData {
        self.a.group()
    }

    fn levi(&self) -> &Levi {
        self.a.levi()
    }

    fn member(&self, p: &Parabolic, lam0: &[Rat], order: i64) -> Result<Member> {
        let ma = self.a.member(p, lam0, order)?;
        let mb = self.b.member(p, lam0, order)?;
        let mut tag = ma.tag;
        for (k, e) in mb.tag {
            *tag.entry(k).or_insert(0) += e;
        }
        tag.retain(|_, e| *e != 0);
        Ok(Member {
            series: ma.series.mul(&mb.series).truncate_to(order),
            tag,
        })
    }
}

/// `restrict_family` for member families: members over Q in P(L) are the
/// common restriction of the members at any refinement P of Q; the
/// independence of the choice is checked.
pub struct RestrictedFamily<'a> {
    inner: &'a dyn GmFamily,
    to: Levi,
}

pub fn restrict_gm<'a>(inner: &'a dyn GmFamily, to: &Levi) -> Result<RestrictedFamily<'a>> {
    if !inner.levi().refines(to) {
        return Err(Error::IncompatiblePair);
    }
    Ok(RestrictedFamily {
        inner,
        to: to.clone(),
    })
}

impl GmFamily for RestrictedFamily<'_> {
    fn group(&self) -> &GroupData {
        self.inner.group()
    }

    fn levi(&self) -> &Levi {
        &self.to
    }

    fn member(&self, q: &Parabolic, lam0: &[Rat], order: i64) -> Result<Member> {
        let mut found: Option<Member> = None;
        for p in p_of(self.inner.group(), self.inner.levi()) {
            if !p.contained_in(q) {
                continue;
            }
            let m = self.inner.member(&p, lam0, order)?;
            match &found {
                None => found = Some(m),
                Some(prev) => {
                    if prev.series != m.series || prev.tag != m.tag {
                        return Err(Error::ChoiceDependent);
                    }
                }
            }
        }
        found.ok_or(Error::IncompatiblePair)
    }
}

/// `restrict_family` for point families: project onto the coarser Levi.
pub fn restrict_point_family(
    f: &PositiveOrthogonalFamily,
    l: &Levi,
) -> Result<PositiveOrthogonalFamily> {
    if !f.levi().refines(l) {
        return Err(Error::IncompatiblePair);
    }
    let g = f.group().clone();
    let mut pts = BTreeMap::new();
    for q in p_of(&g, l) {
        let y = crate::polytope::family_point_for(f, &q)?;
        pts.insert(q, y);
    }
    PositiveOrthogonalFamily::new(g, l.clone(), pts)
}

/// Deterministic generic directions for a Levi: projections of power vectors
/// (k^0, ..., k^{n-1}), filtered for genericity.
pub fn generic_directions(g: &GroupData, m: &Levi, count: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    let mut k: i64 = 2;
    while out.len() < count && k < 200 {
        let raw: Vec<Rat> = (0..g.n()).map(|i| rat_i(k.pow(i as u32))).collect();
        let v = g.project_trace_zero(&raw);
        let v = project_levi(g, &v, m, ProjPart::OntoLevi).expect("ambient");
        let generic = p_of(g, m)
            .iter()
            .all(|p| check_generic_for(g, p, &v).is_ok());
        if generic {
            out.push(v);
        }
        k += 1;
    }
    assert_eq!(out.len(), count, "could not find enough generic directions");
    out
}

/// `family_limit`: the value at t = 0 of sum_P d_P(t L0)^{-1} b_P(t L0),
/// computed for every supplied direction; all negative-degree coefficients
/// must vanish exactly and all directions must agree.
pub fn family_limit(fam: &dyn GmFamily, lam0s: &[Vec<Rat>]) -> Result<ScaledRat> {
    assert!(!lam0s.is_empty(), "need at least one direction");
    let g = fam.group();
    let m = fam.levi();
    let rank = m.num_blocks() as i64 - 1;
    let order = rank + 2;
    let mut results: Vec<ScaledRat> = Vec::new();
    for lam0 in lam0s {
        let mut total: Option<(SeriesQ, BTreeMap<(Levi, TagKind), i64>)> = None;
        for p in p_of(g, m) {
            check_generic_for(g, &p, lam0)?;
            let (dp, dp_tag) = dp_series(g, &p, lam0, order)?;
            let dpi = dp.inverse()?;
            let mb = fam.member(&p, lam0, order)?;
            let term = dpi.mul(&mb.series);
            let mut tag = mb.tag.clone();
            // Inverting d_P negates its covolume exponents, so the term
            // carries covol(X_*(M_scnx))^{+1} from d_P^{-1}.
            for (k, e) in dp_tag.tag {
                *tag.entry(k).or_insert(0) -= e;
            }
            tag.retain(|_, e| *e != 0);
            match &mut total {
                None => total = Some((term, tag)),
                Some((acc, acc_tag)) => {
                    if *acc_tag != tag {
                        return Err(Error::IncompatibleReference);
                    }
                    *acc = acc.add(&term);
                }
            }
        }
        let (sum, tag) = total.expect("P(M) nonempty");
        // Exact pole cancellation.
        for d in -rank..0 {
            let c = sum.coeff(d)?;
            if !c.is_zero() {
                return Err(Error::PrincipalPart(d));
            }
        }
        let value = sum.coeff(0)?;
        results.push(ScaledRat { value, tag });
    }
    for r in &results[1..] {
        if r.value != results[0].value || r.tag != results[0].tag {
            return Err(Error::DirectionDisagreement);
        }
    }
    Ok(results.pop().unwrap())
}

/// Which route to use for a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Limit,
}

/// Coset representatives of X_*(M)/X_*(M_scnx), computed via the Smith
/// normal form of the inclusion. For SL(n) the quotient is trivial.
pub fn coset_reps(g: &GroupData, m: &Levi) -> Vec<Vec<Rat>> {
    let full = cochar_lattice(g, m, LatticeKind::Full);
    let scnx = cochar_lattice(g, m, LatticeKind::Scnx);
    let r = full.rank();
    if r == 0 {
        return vec![crate::ratmat::vzero(g.n())];
    }
    // scnx basis in terms of the full basis: integer matrix.
    let a: Vec<Vec<BigInt>> = scnx
        .basis()
        .iter()
        .map(|s| {
            crate::ratmat::express_in_basis(full.basis(), s)
                .expect("scnx inside full lattice")
                .into_iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    let (diag, v) = crate::ratmat::smith_normal_form(&a);
    // New basis of the full lattice adapted to the quotient: rows of V^{-1} F.
    let v_rat: Vec<Vec<Rat>> = v
        .iter()
        .map(|row| row.iter().map(|x| Rat::from(x.clone())).collect())
        .collect();
    let mut vinv: Vec<Vec<Rat>> = Vec::with_capacity(r);
    for i in 0..r {
        let mut e = crate::ratmat::vzero(r);
        e[i] = Rat::one();
        // Solve x V = e_i, i.e. V^T x^T = e_i^T.
        let vt: Vec<Vec<Rat>> = (0..r)
            .map(|a_| (0..r).map(|b_| v_rat[a_][b_].clone()).collect())
            .collect();
        let cols: Vec<Vec<Rat>> = (0..r)
            .map(|j| (0..r).map(|k| vt[j][k].clone()).collect())
            .collect();
        let x = crate::ratmat::express_in_basis(&cols, &e).expect("V unimodular");
        vinv.push(x);
    }
    let adapted: Vec<Vec<Rat>> = vinv
        .iter()
        .map(|row| {
            let mut acc = crate::ratmat::vzero(g.n());
            for (c, f) in row.iter().zip(full.basis().iter()) {
                acc = vadd(&acc, &vscale(c, f));
            }
            acc
        })
        .collect();
    // Enumerate 0 <= c_i < d_i.
    let bounds: Vec<i64> = diag
        .iter()
        .map(|d| d.to_i64().expect("small index").abs().max(1))
        .collect();
    let mut reps = vec![crate::ratmat::vzero(g.n())];
    for (i, b) in bounds.iter().enumerate() {
        let mut next = Vec::new();
        for rep in &reps {
            for c in 0..*b {
                next.push(vadd(rep, &vscale(&rat_i(c), &adapted[i])));
            }
        }
        reps = next;
    }
    reps
}

/// `w_weight`, direct route: count the points of xi_M + X_*(M) inside the
/// closed hull of the family points by exact box enumeration.
fn w_weight_direct(f: &PositiveOrthogonalFamily, xi: &[Rat]) -> Result<u64> {
    let g = f.group();
    let m = f.levi();
    let xi_m = project_levi(g, xi, m, ProjPart::OntoLevi)?;
    let lattice = cochar_lattice(g, m, LatticeKind::Full);
    let basis = lattice.basis();
    if basis.is_empty() {
        return Ok(if hull_member(f, &xi_m)? { 1 } else { 0 });
    }
    // Coordinates of each vertex offset in the lattice basis give the box.
    let mut lo = vec![Rat::zero(); basis.len()];
    let mut hi = vec![Rat::zero(); basis.len()];
    let mut first = true;
    for y in f.points().values() {
        let offset = vsub(y, &xi_m);
        let coords = crate::ratmat::express_in_basis(basis, &offset).ok_or(Error::NotInSpan)?;
        for (i, c) in coords.iter().enumerate() {
            if first || *c < lo[i] {
                lo[i] = c.clone();
            }
            if first || *c > hi[i] {
                hi[i] = c.clone();
            }
        }
        first = false;
    }
    let ranges: Vec<(i64, i64)> = lo
        .iter()
        .zip(hi.iter())
        .map(|(a, b)| {
            (
                a.ceil().to_integer().to_i64().expect("small box"),
                b.floor().to_integer().to_i64().expect("small box"),
            )
        })
        .collect();
    let mut count = 0u64;
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if idx.iter().zip(&ranges).any(|(i, r)| *i > r.1) {
        return Ok(0);
    }
    loop {
        let mut candidate = xi_m.clone();
        for (c, b) in idx.iter().zip(basis.iter()) {
            candidate = vadd(&candidate, &vscale(&rat_i(*c), b));
        }
        if hull_member(f, &candidate)? {
            count += 1;
        }
        // Advance the multi-index.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(count);
            }
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
        }
    }
}

fn scnx_contains_family(f: &PositiveOrthogonalFamily) -> bool {
    let scnx = cochar_lattice(f.group(), f.levi(), LatticeKind::Scnx);
    f.points().values().all(|y| scnx.contains(y))
}

fn w_weight_limit(f: &PositiveOrthogonalFamily, xi: &[Rat]) -> Result<u64> {
    // The limit formula shifts a geometric series by the family points, so
    // it computes the lattice count only when they are themselves lattice
    // points (always true for families assembled from adelic heights).
    if !scnx_contains_family(f) {
        return Err(Error::NonIntegralFamily);
    }
    let g = f.group();
    let m = f.levi();
    let xi_m = project_levi(g, xi, m, ProjPart::OntoLevi)?;
    let dirs = generic_directions(g, m, 3);
    let vfam = v_family(f);
    let mut total = Rat::zero();
    for mu0 in coset_reps(g, m) {
        let wfam = w_family(g, &vadd(&mu0, &xi_m), m)?;
        let prod = product_family(&vfam, &wfam)?;
        let lim = family_limit(&prod, &dirs)?;
        if !lim.tag.is_empty() {
            return Err(Error::IncompatibleReference);
        }
        total += lim.value;
    }
    if !total.is_integer() || total.is_negative() {
        return Err(Error::InvalidFamily(format!(
            "limit weight {total} is not a nonnegative integer"
        )));
    }
    Ok(total.to_integer().to_u64().expect("small count"))
}

pub fn w_weight(f: &PositiveOrthogonalFamily, xi: &[Rat], method: Method) -> Result<u64> {
    match method {
        Method::Direct => w_weight_direct(f, xi),
        Method::Limit => w_weight_limit(f, xi),
    }
}

/// `v_weight`, direct route: exact lattice-normalized hull volume, computed
/// in the coordinates of the coroot basis of a fixed ordering and tagged
/// with the coroot lattice as reference.
fn v_weight_direct(f: &PositiveOrthogonalFamily) -> Result<NormalizedScalar> {
    let g = f.group();
    let m = f.levi();
    let scnx = cochar_lattice(g, m, LatticeKind::Scnx);
    let p0 = p_of(g, m).into_iter().next().expect("P(M) nonempty");
    let coroots = root_bases(g, &p0).simple_coroots;
    if coroots.len() > 3 {
        return Err(Error::Unsupported(
            "exact hull volume implemented through rank 3 (n <= 4)".into(),
        ));
    }
    let coords: Vec<Vec<Rat>> = f
        .points()
        .values()
        .map(|y| crate::ratmat::express_in_basis(&coroots, y).ok_or(Error::NotInSpan))
        .collect::<Result<_>>()?;
    let vol = crate::geom::polytope_volume(&coords);
    Ok(NormalizedScalar {
        value: vol,
        reference: scnx,
    })
}

fn v_weight_limit(f: &PositiveOrthogonalFamily) -> Result<NormalizedScalar> {
    let g = f.group();
    let m = f.levi();
    let dirs = generic_directions(g, m, 3);
    let vfam = v_family(f);
    let lim = family_limit(&vfam, &dirs)?;
    // The only tag is covol(X_*(M_scnx))^{+1} (absent when M = G).
    let scnx = cochar_lattice(g, m, LatticeKind::Scnx);
    let expected: BTreeMap<(Levi, TagKind), i64> = if m.num_blocks() == 1 {
        BTreeMap::new()
    } else {
        let mut t = BTreeMap::new();
        t.insert((m.clone(), TagKind::Scnx), 1);
        t
    };
    if lim.tag != expected {
        return Err(Error::IncompatibleReference);
    }
    Ok(NormalizedScalar {
        value: lim.value,
        reference: scnx,
    })
}

pub fn v_weight(f: &PositiveOrthogonalFamily, method: Method) -> Result<NormalizedScalar> {
    match method {
        Method::Direct => v_weight_direct(f),
        Method::Limit => v_weight_limit(f),
    }
}

/// `wl_sum_identity`: both sides of the coset-sum identity
/// sum_mu w_L(mu + xi_M) = [covol ratio] * w_L^xi(1), as tagged scalars.
/// `shift` optionally translates every coset representative by a coroot
/// lattice vector, which must not change the left side.
pub fn wl_sum_identity(
    g: &GroupData,
    m: &Levi,
    l: &Levi,
    xi: &[Rat],
    shift: Option<&[Rat]>,
) -> Result<(ScaledRat, ScaledRat)> {
    if !m.refines(l) {
        return Err(Error::IncompatiblePair);
    }
    g.check_ambient(xi)?;
    let xi_m = project_levi(g, xi, m, ProjPart::OntoLevi)?;
    let dirs = generic_directions(g, l, 3);
    let mut lhs: Option<ScaledRat> = None;
    for mu0 in coset_reps(g, m) {
        let mu0 = match shift {
            Some(s) => vadd(&mu0, s),
            None => mu0,
        };
        let wfam = w_family(g, &vadd(&mu0, &xi_m), m)?;
        let restricted = restrict_gm(&wfam, l)?;
        let lim = family_limit(&restricted, &dirs)?;
        lhs = Some(match lhs {
            None => lim,
            Some(acc) => {
                if acc.tag != lim.tag {
                    return Err(Error::IncompatibleReference);
                }
                ScaledRat {
                    value: acc.value + lim.value,
                    tag: acc.tag,
                }
            }
        });
    }
    let lhs = lhs.expect("at least one coset representative");
    // Right side: w_L^xi(1) is the weight of the trivial family over L.
    let xi_l = project_levi(g, xi, l, ProjPart::OntoLevi)?;
    let full_l = cochar_lattice(g, l, LatticeKind::Full);
    let indicator = if full_l.contains(&xi_l) {
        Rat::one()
    } else {
        Rat::zero()
    };
    let rhs = ScaledRat::with_tag(indicator, l.clone(), TagKind::Full, 1).mul(
        &ScaledRat::with_tag(Rat::one(), m.clone(), TagKind::Full, -1),
    );
    Ok((lhs, rhs))
}

/// `reformulation_check`: the coset sum of limits of the product family on
/// the left, the direct lattice count on the right.
pub fn reformulation_check(f: &PositiveOrthogonalFamily, xi: &[Rat]) -> Result<(Rat, u64)> {
    let g = f.group();
    let m = f.levi();
    if !scnx_contains_family(f) {
        return Err(Error::NonIntegralFamily);
    }
    let xi_m = project_levi(g, xi, m, ProjPart::OntoLevi)?;
    let dirs = generic_directions(g, m, 3);
    let vfam = v_family(f);
    let mut lhs = Rat::zero();
    for mu0 in coset_reps(g, m) {
        let wfam = w_family(g, &vadd(&mu0, &xi_m), m)?;
        let prod = product_family(&vfam, &wfam)?;
        let lim = family_limit(&prod, &dirs)?;
        if !lim.tag.is_empty() {
            return Err(Error::IncompatibleReference);
        }
        lhs += lim.value;
    }
    let rhs = w_weight_direct(f, xi)?;
    Ok((lhs, rhs))
}

/// Wall agreement of a member family: on each adjacency wall the two members
/// must coincide as series along any direction inside the wall.
pub fn recollement_check(fam: &dyn GmFamily, order: i64) -> Result<bool> {
    let g = fam.group();
    let m = fam.levi();
    let paras = p_of(g, m);
    for p in &paras {
        for q in &paras {
            if p >= q {
                continue;
            }
            let Some(alpha) = crate::rootdata::adjacency_coroot(g, p, q)? else {
                continue;
            };
            // Directions inside the wall: project generic directions onto the
            // hyperplane orthogonal to alpha.
            for lam in generic_directions(g, m, 3) {
                let c = dot(&lam, &alpha) / dot(&alpha, &alpha);
                let wall = vsub(&lam, &vscale(&c, &alpha));
                let ma = fam.member(p, &wall, order)?;
                let mb = fam.member(q, &wall, order)?;
                if ma.series != mb.series {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::PositiveOrthogonalFamily;
    use crate::ratmat::rat;
    use crate::rootdata::{full_levi, torus};
    use std::collections::BTreeMap;

    fn g2() -> GroupData {
        GroupData::new(2).unwrap()
    }

    fn segment(c: i64) -> PositiveOrthogonalFamily {
        let g = g2();
        let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        let bb = Parabolic::new(&g, vec![vec![1], vec![0]]).unwrap();
        let mut pts = BTreeMap::new();
        pts.insert(b, vec![rat_i(c), rat_i(-c)]);
        pts.insert(bb, vec![rat_i(0), rat_i(0)]);
        PositiveOrthogonalFamily::new(g, torus(&g2()), pts).unwrap()
    }

    /// A constant test family (members identically equal to a constant):
    /// whether it is a valid gluing family depends on the constants.
    struct ConstFamily {
        g: GroupData,
        m: Levi,
        values: BTreeMap<Parabolic, Rat>,
    }

    impl GmFamily for ConstFamily {
        fn group(&self) -> &GroupData {
            &self.g
        }
        fn levi(&self) -> &Levi {
            &self.m
        }
        fn member(&self, p: &Parabolic, _lam0: &[Rat], order: i64) -> Result<Member> {
            Ok(Member {
                series: SeriesQ::constant(self.values[p].clone(), order),
                tag: BTreeMap::new(),
            })
        }
    }

    #[test]
    fn constant_family_limit_vanishes() {
        // Members identically 1 over a proper Levi: the singular sum tends
        // to 0 (the volume of a point).
        let g = g2();
        let m = torus(&g);
        let values: BTreeMap<Parabolic, Rat> = crate::rootdata::p_of(&g, &m)
            .into_iter()
            .map(|p| (p, Rat::one()))
            .collect();
        let fam = ConstFamily {
            g: g.clone(),
            m: m.clone(),
            values,
        };
        let dirs = generic_directions(&g, &m, 3);
        let lim = family_limit(&fam, &dirs).unwrap();
        assert!(lim.value.is_zero());
    }

    #[test]
    fn unbalanced_constants_fail_the_pole_check() {
        // Constants 1 and 2 leave a first-order pole: a hard error.
        let g = g2();
        let m = torus(&g);
        let paras = crate::rootdata::p_of(&g, &m);
        let mut values = BTreeMap::new();
        values.insert(paras[0].clone(), rat_i(1));
        values.insert(paras[1].clone(), rat_i(2));
        let fam = ConstFamily {
            g: g.clone(),
            m: m.clone(),
            values,
        };
        let dirs = generic_directions(&g, &m, 1);
        assert!(matches!(
            family_limit(&fam, &dirs),
            Err(Error::PrincipalPart(_))
        ));
    }

    #[test]
    fn full_group_limit_is_member_value() {
        let g = g2();
        let m = full_levi(&g);
        let p = Parabolic::new(&g, vec![vec![0, 1]]).unwrap();
        let mut values = BTreeMap::new();
        values.insert(p, rat(7, 3));
        let fam = ConstFamily {
            g: g.clone(),
            m: m.clone(),
            values,
        };
        let dirs = generic_directions(&g, &m, 1);
        let lim = family_limit(&fam, &dirs).unwrap();
        assert_eq!(lim.value, rat(7, 3));
        assert!(lim.tag.is_empty());
    }

    #[test]
    fn v_family_members_and_limits() {
        // All points zero: constant member family with vanishing limit
        // (point hull) for M != G.
        let f0 = segment(0);
        let vf = v_family(&f0);
        let g = g2();
        let m = torus(&g);
        let dirs = generic_directions(&g, &m, 3);
        let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        let member = vf.member(&b, &dirs[0], 4).unwrap();
        assert_eq!(member.series.coeff(0).unwrap(), rat_i(1));
        assert_eq!(member.series.coeff(1).unwrap(), rat_i(0));
        let lim = family_limit(&vf, &dirs).unwrap();
        assert!(lim.value.is_zero());
        // Y_B = 3 alpha-check: member along a direction pairing to 1 is
        // the exponential series of 3t.
        let f3 = segment(3);
        let vf3 = v_family(&f3);
        let lam = vec![rat(1, 2), rat(-1, 2)];
        let mem = vf3.member(&b, &lam, 4).unwrap();
        assert_eq!(mem.series.coeff(1).unwrap(), rat_i(3));
        assert_eq!(mem.series.coeff(2).unwrap(), rat(9, 2));
    }

    #[test]
    fn dp_series_shapes() {
        let g = g2();
        let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        let full = Parabolic::new(&g, vec![vec![0, 1]]).unwrap();
        let lam = vec![rat(1, 2), rat(-1, 2)];
        let (s, tag) = dp_series(&g, &b, &lam, 4).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.coeff(1).unwrap(), rat_i(1));
        assert_eq!(tag.tag.len(), 1);
        let (s1, tag1) = dp_series(&g, &full, &lam, 4).unwrap();
        assert_eq!(s1.coeff(0).unwrap(), rat_i(1));
        assert!(tag1.tag.is_empty());
        // Non-generic directions are rejected.
        let wall = vec![rat_i(0), rat_i(0)];
        assert!(dp_series(&g, &b, &wall, 4).is_err());
    }

    #[test]
    fn full_group_weights() {
        // For M = G: the polytope is a point in a zero-dimensional space,
        // the count is 1 and the volume is the empty-product 1.
        let g = g2();
        let m = full_levi(&g);
        let p = Parabolic::new(&g, vec![vec![0, 1]]).unwrap();
        let mut pts = BTreeMap::new();
        pts.insert(p, vec![rat_i(0), rat_i(0)]);
        let f = PositiveOrthogonalFamily::new(g.clone(), m, pts).unwrap();
        let xi = vec![rat(1, 2), rat(-1, 2)];
        assert_eq!(w_weight(&f, &xi, Method::Direct).unwrap(), 1);
        assert_eq!(w_weight(&f, &xi, Method::Limit).unwrap(), 1);
        let v = v_weight(&f, Method::Direct).unwrap();
        assert_eq!(v.value, rat_i(1));
        assert!(v.eq_exact(&v_weight(&f, Method::Limit).unwrap()).unwrap());
        // And the nearest point of the full-space polytope is xi itself.
        let r = crate::polytope::hn_point(&f, &xi).unwrap();
        assert_eq!(r.rho, xi);
        assert!(r.q.is_full_group());
        assert!(r.dist2.is_zero());
    }

    #[test]
    fn limit_requires_integral_points() {
        let g = g2();
        let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
        let bb = Parabolic::new(&g, vec![vec![1], vec![0]]).unwrap();
        let mut pts = BTreeMap::new();
        pts.insert(b, vec![rat(1, 2), rat(-1, 2)]);
        pts.insert(bb, vec![rat_i(0), rat_i(0)]);
        let f = PositiveOrthogonalFamily::new(g.clone(), torus(&g), pts).unwrap();
        let xi = vec![rat(1, 4), rat(-1, 4)];
        assert_eq!(w_weight(&f, &xi, Method::Direct).unwrap(), 1);
        assert!(matches!(
            w_weight(&f, &xi, Method::Limit),
            Err(Error::NonIntegralFamily)
        ));
        // The volume limit handles rational families fine.
        let vd = v_weight(&f, Method::Direct).unwrap();
        let vl = v_weight(&f, Method::Limit).unwrap();
        assert_eq!(vd.value, rat(1, 2));
        assert!(vd.eq_exact(&vl).unwrap());
    }
}

#[cfg(test)]
mod restriction_tests {
    use super::*;
    use crate::genfam::{random_family, random_xi};
    use crate::polytope::validate_family;
    use crate::rootdata::{enumerate_levis, torus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_family_restriction_is_valid_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = GroupData::new(3).unwrap();
        let m = torus(&g);
        for _ in 0..10 {
            let f = random_family(&mut rng, &g, &m, true, 3);
            for l in enumerate_levis(&g) {
                if !m.refines(&l) {
                    continue;
                }
                let restricted = restrict_point_family(&f, &l).unwrap();
                validate_family(&restricted).unwrap();
                if l == m {
                    assert_eq!(restricted.points(), f.points());
                }
                if l.num_blocks() == 1 {
                    // Restriction to the full group collapses to the origin.
                    for y in restricted.points().values() {
                        assert!(crate::ratmat::is_zero_vec(y));
                    }
                }
                // Weights of the restricted family agree between routes.
                let xi = random_xi(&mut rng, &g, true);
                assert_eq!(
                    w_weight(&restricted, &xi, Method::Direct).unwrap(),
                    w_weight(&restricted, &xi, Method::Limit).unwrap()
                );
            }
        }
    }
}
