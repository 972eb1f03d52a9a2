//! Seeded invariant suites over randomly generated families: the polytope
//! equivalences, nearest-point correctness, the two-route weight and volume
//! equalities, the coset-sum identities, and assorted structural
//! invariants. Each suite reports counts and collects failure descriptions
//! instead of panicking, so callers decide how to surface problems.

use crate::genfam::{random_family, random_levi, random_levi_vector, random_xi};
use crate::polytope::{
    chamber_partition_check, cm_member, cone_member, family_point_for, hn_point, hull_member,
    langlands_indicator, validate_family, CmMode, ConeKind,
};
use crate::ratmat::{dot, rat, rat_i, vadd, vscale, vsub, Rat};
use crate::rootdata::{
    cochar_lattice, enumerate_levis, f_of, project_levi, GroupData, LatticeKind, ProjPart,
};
use crate::weights::{
    recollement_check, reformulation_check, v_family, v_weight, w_family, w_weight,
    wl_sum_identity, Method,
};
use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Default)]
pub struct SuiteOutcome {
    pub cases: u64,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.failures.push(msg());
        }
    }

    fn merge(&mut self, other: SuiteOutcome) {
        self.cases += other.cases;
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

/// A random point that is frequently near or inside the hull: a convex
/// combination of vertices perturbed by a small vector of a_M, then spread
/// through the ambient space part of the time.
fn random_probe<R: Rng>(rng: &mut R, f: &crate::polytope::PositiveOrthogonalFamily) -> Vec<Rat> {
    let g = f.group();
    let pts: Vec<&Vec<Rat>> = f.points().values().collect();
    let mut weights: Vec<i64> = (0..pts.len()).map(|_| rng.gen_range(0..=4)).collect();
    if weights.iter().all(|w| *w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let mut v = crate::ratmat::vzero(g.n());
    for (w, p) in weights.iter().zip(&pts) {
        v = vadd(&v, &vscale(&rat(*w, total), p));
    }
    if rng.gen_bool(0.7) {
        let noise = random_levi_vector(rng, g, f.levi(), 6);
        let sc = rat(rng.gen_range(0..=2), rng.gen_range(1..=3));
        v = vadd(&v, &vscale(&sc, &noise));
    }
    if rng.gen_bool(0.3) {
        // Leave a_M: the memberships must still agree after projection.
        let raw: Vec<Rat> = (0..g.n())
            .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
            .collect();
        v = vadd(&v, &g.project_trace_zero(&raw));
    }
    v
}

fn random_generic_direction<R: Rng>(
    rng: &mut R,
    f: &crate::polytope::PositiveOrthogonalFamily,
) -> Vec<Rat> {
    let g = f.group();
    loop {
        let cand = random_levi_vector(rng, g, f.levi(), 5);
        if crate::ratmat::is_zero_vec(&cand) {
            continue;
        }
        let generic = crate::rootdata::p_of(g, f.levi()).iter().all(|p| {
            crate::rootdata::root_bases(g, p)
                .simple_coroots
                .iter()
                .all(|a| !dot(&cand, a).is_zero())
        });
        if generic {
            return cand;
        }
    }
}

/// Polytope equivalences: three-mode agreement of the stability membership,
/// closed membership against the convex hull, and the alternating-sum
/// indicator against the hull over several generic directions.
pub fn polytope_suite(
    seed: u64,
    families: usize,
    points_per_family: usize,
    langlands_dirs: usize,
    ns: &[usize],
) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 1);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        for _ in 0..families {
            let m = random_levi(&mut rng, &g, true);
            let integral = rng.gen_bool(0.5);
            let f = random_family(&mut rng, &g, &m, integral, 3);
            out.cases += 1;
            let has_dirs = f.levi().num_blocks() > 1;
            let dirs: Vec<Vec<Rat>> = if has_dirs {
                (0..langlands_dirs)
                    .map(|_| random_generic_direction(&mut rng, &f))
                    .collect()
            } else {
                vec![]
            };
            for _ in 0..points_per_family {
                let v = random_probe(&mut rng, &f);
                for closed in [false, true] {
                    let all = cm_member(&f, &v, closed, CmMode::AllF).unwrap();
                    let only_p = cm_member(&f, &v, closed, CmMode::OnlyP).unwrap();
                    let only_max = cm_member(&f, &v, closed, CmMode::OnlyMaximal).unwrap();
                    out.check(all == only_p && only_p == only_max, || {
                        format!("mode disagreement on {f:?} at {v:?} closed={closed}")
                    });
                }
                let open_cm = cm_member(&f, &v, false, CmMode::OnlyP).unwrap();
                let closed_cm = cm_member(&f, &v, true, CmMode::OnlyP).unwrap();
                out.check(!open_cm || closed_cm, || {
                    "open membership without closed membership".into()
                });
                let hull = hull_member(&f, &v).unwrap();
                out.check(closed_cm == hull, || {
                    format!("closed membership != hull membership at {v:?}")
                });
                if has_dirs {
                    for lam in &dirs {
                        let ind = langlands_indicator(&f, &v, lam).unwrap();
                        out.check(ind == i64::from(hull), || {
                            format!("indicator {ind} != hull {hull} at {v:?}")
                        });
                    }
                }
            }
        }
    }
    out
}

/// Nearest-point correctness: uniqueness, the acute-cone and affine-face
/// conditions, membership, and minimality against vertices and sampled
/// points of the polytope.
pub fn hn_suite(seed: u64, families: usize, samples: usize, ns: &[usize]) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 2);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        for _ in 0..families {
            let m = random_levi(&mut rng, &g, true);
            let integral = rng.gen_bool(0.5);
            let f = random_family(&mut rng, &g, &m, integral, 3);
            let xi = random_xi(&mut rng, &g, false);
            out.cases += 1;
            let r = match hn_point(&f, &xi) {
                Ok(r) => r,
                Err(e) => {
                    out.checks += 1;
                    out.failures.push(format!("nearest point failed: {e}"));
                    continue;
                }
            };
            let offset = vsub(&xi, &r.rho);
            let offset_q = project_levi(&g, &offset, &r.q.levi(), ProjPart::OntoLevi).unwrap();
            out.check(offset_q == offset, || "xi - rho not in a_Q".into());
            out.check(
                cone_member(&g, &r.q, &offset, ConeKind::Acute).unwrap(),
                || "xi - rho outside the strict acute cone".into(),
            );
            let rho_q = project_levi(&g, &r.rho, &r.q.levi(), ProjPart::OntoLevi).unwrap();
            let yq = family_point_for(&f, &r.q).unwrap();
            out.check(rho_q == yq, || "rho not on the affine face of Q".into());
            out.check(cm_member(&f, &r.rho, true, CmMode::OnlyP).unwrap(), || {
                "rho outside the closed polytope".into()
            });
            out.check(r.dist2 == dot(&offset, &offset), || {
                "distance mismatch".into()
            });
            // Minimality against all vertices and sampled hull points.
            for y in f.points().values() {
                let d = vsub(y, &xi);
                out.check(dot(&d, &d) >= r.dist2, || {
                    "vertex beats the nearest point".into()
                });
            }
            for _ in 0..samples {
                let pts: Vec<&Vec<Rat>> = f.points().values().collect();
                let mut weights: Vec<i64> = (0..pts.len()).map(|_| rng.gen_range(0..=3)).collect();
                if weights.iter().all(|w| *w == 0) {
                    weights[0] = 1;
                }
                let total: i64 = weights.iter().sum();
                let mut v = crate::ratmat::vzero(g.n());
                for (w, p) in weights.iter().zip(&pts) {
                    v = vadd(&v, &vscale(&rat(*w, total), p));
                }
                let d = vsub(&v, &xi);
                out.check(dot(&d, &d) >= r.dist2, || {
                    "sampled hull point beats the nearest point".into()
                });
            }
        }
    }
    out
}

/// The two-route equality of the lattice-count weight on integral families.
pub fn weight_equivalence_suite(
    seed: u64,
    families: usize,
    xis_per_family: usize,
    ns: &[usize],
) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 3);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        for _ in 0..families {
            let m = random_levi(&mut rng, &g, true);
            let f = random_family(&mut rng, &g, &m, true, 3);
            out.cases += 1;
            for _ in 0..xis_per_family {
                let xi = random_xi(&mut rng, &g, true);
                let direct = w_weight(&f, &xi, Method::Direct).unwrap();
                let limit = w_weight(&f, &xi, Method::Limit).unwrap();
                out.check(direct == limit, || {
                    format!("w direct {direct} != limit {limit} on {}", f.levi())
                });
            }
        }
    }
    out
}

/// The two-route equality of the volume weight on rational families.
pub fn volume_equivalence_suite(seed: u64, families: usize, ns: &[usize]) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 4);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        for _ in 0..families {
            let m = random_levi(&mut rng, &g, true);
            let integral = rng.gen_bool(0.3);
            let f = random_family(&mut rng, &g, &m, integral, 3);
            out.cases += 1;
            let direct = v_weight(&f, Method::Direct).unwrap();
            let limit = v_weight(&f, Method::Limit).unwrap();
            out.check(direct.eq_exact(&limit).unwrap(), || {
                format!(
                    "v direct {} != limit {} on {}",
                    direct.value,
                    limit.value,
                    f.levi()
                )
            });
        }
    }
    out
}

/// The coset-sum identity and the product-family reformulation, including a
/// second choice of coset representatives.
pub fn identity_suite(seed: u64, instances: usize, ns: &[usize]) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 5);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        let levis = enumerate_levis(&g);
        for _ in 0..instances {
            let m = random_levi(&mut rng, &g, false);
            let coarser: Vec<_> = levis.iter().filter(|l| m.refines(l)).collect();
            let l = coarser[rng.gen_range(0..coarser.len())].clone();
            let xi = random_xi(&mut rng, &g, false);
            out.cases += 1;
            match wl_sum_identity(&g, &m, &l, &xi, None) {
                Ok((lhs, rhs)) => {
                    out.check(lhs.eq_exact(&rhs, &g).unwrap(), || {
                        format!("coset-sum identity fails: {} vs {}", lhs.value, rhs.value)
                    });
                    // Second representative choice: shift by a coroot
                    // lattice vector.
                    let scnx = cochar_lattice(&g, &m, LatticeKind::Scnx);
                    if scnx.rank() > 0 {
                        let shift = scnx.basis()[0].clone();
                        let (lhs2, _) = wl_sum_identity(&g, &m, &l, &xi, Some(&shift)).unwrap();
                        out.check(lhs.eq_exact(&lhs2, &g).unwrap(), || {
                            "coset-sum depends on the representative choice".into()
                        });
                    }
                }
                Err(e) => {
                    out.checks += 1;
                    out.failures
                        .push(format!("coset-sum identity errored: {e}"));
                }
            }
            // Reformulation on an integral family.
            let f = random_family(&mut rng, &g, &m, true, 2);
            match reformulation_check(&f, &xi) {
                Ok((lhs, rhs)) => {
                    out.check(lhs == rat_i(rhs as i64), || {
                        format!("reformulation {lhs} != direct count {rhs}")
                    });
                }
                Err(e) => {
                    out.checks += 1;
                    out.failures.push(format!("reformulation errored: {e}"));
                }
            }
        }
    }
    out
}

/// Structural invariants: family validation, the chamber partition, wall
/// agreement of constructed member families, and translation invariance of
/// both weights.
pub fn structural_suite(seed: u64, cases: usize, ns: &[usize]) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let mut rng = rng_for(seed, 6);
    for &n in ns {
        let g = GroupData::new(n).expect("n >= 2");
        for _ in 0..cases {
            out.cases += 1;
            // Chamber partition on a random ambient vector.
            let v = random_xi(&mut rng, &g, false);
            out.check(chamber_partition_check(&g, &v).is_ok(), || {
                format!("partition failure at {v:?}")
            });
            // Family-level invariants.
            let m = random_levi(&mut rng, &g, false);
            let f = random_family(&mut rng, &g, &m, true, 2);
            out.check(validate_family(&f).is_ok(), || "family validation".into());
            // Wall agreement for the point family and an integer-part family.
            let vf = v_family(&f);
            out.check(recollement_check(&vf, 5).unwrap(), || {
                "wall disagreement in the point family".into()
            });
            let mu = random_levi_vector(&mut rng, &g, &m, 5);
            let wf = w_family(&g, &mu, &m).unwrap();
            out.check(recollement_check(&wf, 5).unwrap(), || {
                "wall disagreement in the integer-part family".into()
            });
            // Translation invariance: w by a lattice vector, v by anything.
            let xi = random_xi(&mut rng, &g, true);
            let w0 = w_weight(&f, &xi, Method::Direct).unwrap();
            let full = cochar_lattice(&g, &m, LatticeKind::Full);
            if full.rank() > 0 {
                let shift = full.basis()[rng.gen_range(0..full.rank())].clone();
                let f2 = f.translate(&shift).unwrap();
                let w1 = w_weight(&f2, &xi, Method::Direct).unwrap();
                out.check(w0 == w1, || {
                    "lattice-count weight is not translation invariant".into()
                });
            }
            let v0 = v_weight(&f, Method::Direct).unwrap();
            let any_shift = random_levi_vector(&mut rng, &g, &m, 4);
            let f3 = f.translate(&any_shift).unwrap();
            let v1 = v_weight(&f3, Method::Direct).unwrap();
            out.check(v0.eq_exact(&v1).unwrap(), || {
                "volume weight is not translation invariant".into()
            });
            // The partition is exact: exactly one cone per vector, including
            // degenerate vectors in proper subspaces.
            let m2 = random_levi(&mut rng, &g, true);
            let vv = project_levi(&g, &v, &m2, ProjPart::OntoLevi).unwrap();
            out.check(chamber_partition_check(&g, &vv).is_ok(), || {
                "partition failure on projected vector".into()
            });
            // Family points project consistently to every coarser parabolic.
            for q in f_of(&g, &m) {
                out.check(family_point_for(&f, &q).is_ok(), || {
                    format!("inconsistent projections onto {q}")
                });
            }
        }
    }
    out
}

/// One deterministic bundle used by the command-line `identities` command.
pub fn full_identity_run(seed: u64, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let ns = [2usize, 3, 4];
    let fams = cases.max(1);
    out.merge(polytope_suite(seed, fams, 25, 3, &ns));
    out.merge(hn_suite(seed, fams, 15, &ns));
    out.merge(weight_equivalence_suite(seed, fams, 2, &ns));
    out.merge(volume_equivalence_suite(seed, fams, &ns));
    out.merge(identity_suite(seed, fams, &[2, 3]));
    out.merge(structural_suite(seed, fams, &ns));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_smoke_suites() {
        assert!(polytope_suite(3, 2, 6, 2, &[2, 3]).ok());
        assert!(hn_suite(3, 2, 4, &[2, 3]).ok());
        assert!(weight_equivalence_suite(3, 2, 1, &[2, 3]).ok());
        assert!(volume_equivalence_suite(3, 2, &[2, 3]).ok());
        assert!(identity_suite(3, 1, &[2]).ok());
        assert!(structural_suite(3, 1, &[2, 3]).ok());
    }
}
