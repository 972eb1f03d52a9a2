//! Stability polytopes attached to a positive orthogonal family: the open
//! and closed polyhedra cut out by obtuse cones, the convex hull of the
//! family points, membership tests, the nearest-point computation and the
//! alternating-sum indicator of the hull.

use crate::geom;
use crate::ratmat::{dot, is_zero_vec, vsub, Rat};
use crate::rootdata::{
    adjacency_coroot, f_of, maximal_proper_over, p_of, project_levi, root_bases, GroupData, Levi,
    Parabolic, ProjPart,
};
use crate::{Error, Result};
use num::{Signed, Zero};
use std::collections::BTreeMap;

/// A family of points (Y_P), one for each ordering P of the blocks of M,
/// normalized to lie in a_M, with Y_P - Y_P' a nonnegative multiple of the
/// adjacency coroot for adjacent P, P'. These arise as -deg(m_P) from
/// parabolic reductions, or as -H_P(g) from Iwasawa heights.
#[derive(Debug, Clone)]
pub struct PositiveOrthogonalFamily {
    group: GroupData,
    levi: Levi,
    points: BTreeMap<Parabolic, Vec<Rat>>,
}

impl PositiveOrthogonalFamily {
    /// Builds a family; requires a point for every P in P(M), each lying in
    /// a_M. Positivity is checked by `validate`.
    pub fn new(
        group: GroupData,
        levi: Levi,
        points: BTreeMap<Parabolic, Vec<Rat>>,
    ) -> Result<Self> {
        let expected = p_of(&group, &levi);
        if points.len() != expected.len() || expected.iter().any(|p| !points.contains_key(p)) {
            return Err(Error::InvalidFamily(format!(
                "need exactly one point per element of P(M) ({} expected)",
                expected.len()
            )));
        }
        for (p, y) in &points {
            group.check_ambient(y)?;
            let comp = project_levi(&group, y, &levi, ProjPart::OntoComplement)?;
            if !is_zero_vec(&comp) {
                return Err(Error::InvalidFamily(format!(
                    "point for {p} is not in a_M (family points are normalized to a_M)"
                )));
            }
        }
        Ok(PositiveOrthogonalFamily {
            group,
            levi,
            points,
        })
    }

    /// Same as `new` but projects the given points onto a_M first.
    pub fn from_raw(
        group: GroupData,
        levi: Levi,
        points: BTreeMap<Parabolic, Vec<Rat>>,
    ) -> Result<Self> {
        let mut proj = BTreeMap::new();
        for (p, y) in points {
            group.check_ambient(&y)?;
            proj.insert(p, project_levi(&group, &y, &levi, ProjPart::OntoLevi)?);
        }
        Self::new(group, levi, proj)
    }

    pub fn group(&self) -> &GroupData {
        &self.group
    }

    pub fn levi(&self) -> &Levi {
        &self.levi
    }

    pub fn point(&self, p: &Parabolic) -> &Vec<Rat> {
        &self.points[p]
    }

    pub fn parabolics(&self) -> impl Iterator<Item = &Parabolic> {
        self.points.keys()
    }

    pub fn points(&self) -> &BTreeMap<Parabolic, Vec<Rat>> {
        &self.points
    }

    /// Translates every point by the same vector of a_M.
    pub fn translate(&self, v: &[Rat]) -> Result<Self> {
        let shifted = self
            .points
            .iter()
            .map(|(p, y)| (p.clone(), crate::ratmat::vadd(y, v)))
            .collect();
        Self::new(self.group.clone(), self.levi.clone(), shifted)
    }
}

/// `validate_family`: returns the coefficient x_alpha for every ordered
/// adjacent pair; errors when a difference is not a rational multiple of the
/// adjacency coroot or has a negative coefficient.
pub fn validate_family(
    f: &PositiveOrthogonalFamily,
) -> Result<BTreeMap<(Parabolic, Parabolic), Rat>> {
    let mut out = BTreeMap::new();
    let paras: Vec<&Parabolic> = f.parabolics().collect();
    for p in &paras {
        for q in &paras {
            if p == q {
                continue;
            }
            let Some(alpha) = adjacency_coroot(&f.group, p, q)? else {
                continue;
            };
            let diff = vsub(f.point(p), f.point(q));
            let x = if is_zero_vec(&diff) {
                Rat::zero()
            } else {
                // diff must be x * alpha with x rational.
                let k = alpha
                    .iter()
                    .position(|c| !c.is_zero())
                    .expect("coroot nonzero");
                let x = &diff[k] / &alpha[k];
                for i in 0..alpha.len() {
                    if &diff[i] != &(&x * &alpha[i]) {
                        return Err(Error::InvalidFamily(format!(
                            "Y_{p} - Y_{q} is not colinear with the adjacency coroot"
                        )));
                    }
                }
                x
            };
            if x.is_negative() {
                return Err(Error::InvalidFamily(format!(
                    "negative coefficient {x} on the adjacency ({p}, {q})"
                )));
            }
            out.insert(((*p).clone(), (*q).clone()), x);
        }
    }
    Ok(out)
}

/// `family_point_for`: the projection of the family onto a_Q for Q in F(M);
/// well defined independently of the refinement P used, which is checked.
pub fn family_point_for(f: &PositiveOrthogonalFamily, q: &Parabolic) -> Result<Vec<Rat>> {
    let mut val: Option<Vec<Rat>> = None;
    for p in f.parabolics() {
        if !p.contained_in(q) {
            continue;
        }
        let proj = project_levi(&f.group, f.point(p), &q.levi(), ProjPart::OntoLevi)?;
        match &val {
            None => val = Some(proj),
            Some(v) => {
                if *v != proj {
                    return Err(Error::InvalidFamily(format!(
                        "projections onto a_{q} differ across refinements"
                    )));
                }
            }
        }
    }
    val.ok_or(Error::IncompatiblePair)
}

/// Cone membership flavors in a_P.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    /// All fundamental-weight pairings strictly positive.
    ObtuseOpen,
    /// All fundamental-weight pairings nonnegative.
    ObtuseClosed,
    /// All simple-root pairings strictly positive.
    Acute,
}

/// `cone_member`: membership of H in the obtuse or acute cone of P. H must
/// lie in a_P. For P = G the conditions are vacuous, so only H = 0 is in the
/// acute cone by the convention a_G^+ = {0} (and it is, trivially).
pub fn cone_member(g: &GroupData, p: &Parabolic, h: &[Rat], kind: ConeKind) -> Result<bool> {
    g.check_ambient(h)?;
    let proj = project_levi(g, h, &p.levi(), ProjPart::OntoLevi)?;
    if proj != h.to_vec() {
        return Err(Error::NotInAmbient("H is not in a_P".into()));
    }
    let rb = root_bases(g, p);
    Ok(match kind {
        ConeKind::ObtuseOpen => rb.dual_basis.iter().all(|w| dot(w, h).is_positive()),
        ConeKind::ObtuseClosed => rb.dual_basis.iter().all(|w| !dot(w, h).is_negative()),
        ConeKind::Acute => rb.simple_roots.iter().all(|a| dot(a, h).is_positive()),
    })
}

/// Index sets for the intersection defining the stability polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmMode {
    AllF,
    OnlyP,
    OnlyMaximal,
}

/// `cm_member`: xi lies in the (open or closed) polytope iff for every
/// parabolic P of the selected index set, every fundamental weight of P is
/// negative (resp. nonpositive) on xi - Y_P.
pub fn cm_member(
    f: &PositiveOrthogonalFamily,
    xi: &[Rat],
    closed: bool,
    mode: CmMode,
) -> Result<bool> {
    f.group.check_ambient(xi)?;
    let index: Vec<Parabolic> = match mode {
        CmMode::AllF => f_of(&f.group, &f.levi),
        CmMode::OnlyP => f.parabolics().cloned().collect(),
        CmMode::OnlyMaximal => {
            if f.levi.num_blocks() == 1 {
                vec![]
            } else {
                maximal_proper_over(&f.group, &f.levi)
            }
        }
    };
    for p in index {
        if p.is_full_group() {
            continue;
        }
        let y = family_point_for(f, &p)?;
        let diff = vsub(xi, &y);
        for w in root_bases(&f.group, &p).dual_basis {
            let v = dot(&w, &diff);
            let ok = if closed {
                !v.is_positive()
            } else {
                v.is_negative()
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `hull_member`: the a_M-projection of v lies in the convex hull of the
/// family points; decided by exact LP feasibility.
pub fn hull_member(f: &PositiveOrthogonalFamily, v: &[Rat]) -> Result<bool> {
    f.group.check_ambient(v)?;
    let target = project_levi(&f.group, v, &f.levi, ProjPart::OntoLevi)?;
    let pts: Vec<Vec<Rat>> = f.points.values().cloned().collect();
    Ok(geom::convex_combination_feasible(&pts, &target))
}

/// Result of the nearest-point computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnResult {
    /// The nearest point of the closed polytope to xi.
    pub rho: Vec<Rat>,
    /// The unique parabolic whose affine face realizes the distance.
    pub q: Parabolic,
    /// Squared distance from xi to rho.
    pub dist2: Rat,
}

/// `hn_point`: the nearest point of the closed polytope to xi, found by the
/// finite search over faces: for each Q containing M, orthogonally project
/// xi onto the affine subspace through the Q-point, then keep the unique
/// candidate that lies in the polytope with xi - rho in the strict acute
/// cone of Q.
pub fn hn_point(f: &PositiveOrthogonalFamily, xi: &[Rat]) -> Result<HnResult> {
    f.group.check_ambient(xi)?;
    let mut successes: Vec<HnResult> = Vec::new();
    for q in f_of(&f.group, &f.levi) {
        let yq = family_point_for(f, &q)?;
        // rho = xi - (xi_Q - Y_Q): subtract the a_Q-component of the offset.
        let offset = project_levi(&f.group, &vsub(xi, &yq), &q.levi(), ProjPart::OntoLevi)?;
        let rho = vsub(xi, &offset);
        // Condition (a): xi - rho in the strict acute cone of Q.
        if !cone_member(&f.group, &q, &offset, ConeKind::Acute)? {
            continue;
        }
        // Membership in the closed polytope.
        if !cm_member(f, &rho, true, CmMode::OnlyP)? {
            continue;
        }
        let dist2 = dot(&offset, &offset);
        successes.push(HnResult { rho, q, dist2 });
    }
    if successes.len() != 1 {
        // The nearest point is unique, so distinct successes indicate an
        // invalid family or a bug; report both cases loudly.
        return Err(Error::NearestPointAmbiguous(successes.len()));
    }
    Ok(successes.pop().unwrap())
}

/// `langlands_indicator`: the alternating sum over P(M) of the sign
/// character of Delta_P^Lambda times the half-open box indicator, evaluated
/// at mu + H_P with H_P = -Y_P. Equals the hull indicator for every generic
/// direction.
pub fn langlands_indicator(
    f: &PositiveOrthogonalFamily,
    mu: &[Rat],
    lambda0: &[Rat],
) -> Result<i64> {
    f.group.check_ambient(mu)?;
    f.group.check_ambient(lambda0)?;
    let mu_m = project_levi(&f.group, mu, &f.levi, ProjPart::OntoLevi)?;
    let mut total: i64 = 0;
    for p in f.parabolics() {
        let rb = root_bases(&f.group, p);
        for a in &rb.simple_coroots {
            if dot(lambda0, a).is_zero() {
                return Err(Error::NonGenericDirection(format!(
                    "direction vanishes on a coroot of {p}"
                )));
            }
        }
        // arg = mu + H_P(g) = mu - Y_P.
        let arg = vsub(&mu_m, f.point(p));
        let mut sign = 1i64;
        let mut inside = true;
        for (a, w) in rb.simple_coroots.iter().zip(rb.dual_basis.iter()) {
            let in_neg = dot(lambda0, a).is_negative();
            let val = dot(w, &arg);
            if in_neg {
                sign = -sign;
                if !val.is_positive() {
                    inside = false;
                    break;
                }
            } else if val.is_positive() {
                inside = false;
                break;
            }
        }
        if inside {
            total += sign;
        }
    }
    Ok(total)
}

/// `chamber_partition_check`: the unique P in F(T) whose strict acute cone
/// contains v; scans every cone and verifies uniqueness.
pub fn chamber_partition_check(g: &GroupData, v: &[Rat]) -> Result<Parabolic> {
    g.check_ambient(v)?;
    let t = crate::rootdata::torus(g);
    let mut hits: Vec<Parabolic> = Vec::new();
    for p in f_of(g, &t) {
        // v in a_P^+ requires v in a_P and all simple roots positive on v.
        let proj = project_levi(g, v, &p.levi(), ProjPart::OntoLevi)?;
        if proj != v.to_vec() {
            continue;
        }
        let strict = root_bases(g, &p)
            .simple_roots
            .iter()
            .all(|a| dot(a, v).is_positive());
        if strict {
            hits.push(p);
        }
    }
    match hits.len() {
        0 => Err(Error::PartitionMiss),
        1 => Ok(hits.pop().unwrap()),
        k => Err(Error::PartitionOverlap(k)),
    }
}
