//! Acceptance gate: one test per criterion, every equality exact, with a
//! printed pass line and the elapsed time. Counting instances cover
//! q in {3, 5} and divisor degrees 1 and 2; each is evaluated at three
//! general-position truncation parameters.

use hitchin_core::adelic::{
    self, build_char, descent_check, fiber_count_direct, fiber_count_formula, gl2_bound_check,
    vol_at, CharCase, CharDatum, FiniteField, Place,
};
use hitchin_core::genfam::{random_family, random_levi, random_xi};
use hitchin_core::polytope::validate_family;
use hitchin_core::ratmat::{rat, rat_i, Rat};
use hitchin_core::rootdata::{GroupData, Parabolic};
use hitchin_core::suite;
use hitchin_core::weights::{v_weight, w_weight, Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const SEED: u64 = 0xC0FFEE;

fn report(name: &str, started: Instant, ok: bool, detail: &str) {
    let line = format!(
        "ACCEPTANCE {name}: {} ({detail}, {:.2?})",
        if ok { "PASS" } else { "FAIL" },
        started.elapsed()
    );
    println!("{line}");
    eprintln!("{line}");
    assert!(ok, "{line}");
}

/// Criteria 1 and 2 share the instance set: 200 seeded random families over
/// SL(n), n in {2, 3, 4}, three general-position parameters each.
fn criterion12_families() -> Vec<(GroupData, hitchin_core::polytope::PositiveOrthogonalFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    let plan = [(2usize, 70usize), (3, 70), (4, 60)];
    for (n, count) in plan {
        let g = GroupData::new(n).unwrap();
        for _ in 0..count {
            let m = random_levi(&mut rng, &g, true);
            let f = random_family(&mut rng, &g, &m, true, 3);
            out.push((g.clone(), f));
        }
    }
    out
}

#[test]
fn criterion_1_weight_formula_equivalence() {
    let started = Instant::now();
    let fams = criterion12_families();
    assert_eq!(fams.len(), 200);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut checks = 0u64;
    for (g, f) in &fams {
        for _ in 0..3 {
            let xi = random_xi(&mut rng, g, true);
            let direct = w_weight(f, &xi, Method::Direct).unwrap();
            let limit = w_weight(f, &xi, Method::Limit).unwrap();
            assert_eq!(direct, limit, "family over {} at xi {xi:?}", f.levi());
            checks += 1;
        }
    }
    report(
        "1 (count weight, direct == limit)",
        started,
        checks == 600,
        &format!("{checks} exact integer equalities"),
    );
}

#[test]
fn criterion_2_volume_formula_equivalence() {
    let started = Instant::now();
    let fams = criterion12_families();
    let mut checks = 0u64;
    for (_, f) in &fams {
        let direct = v_weight(f, Method::Direct).unwrap();
        let limit = v_weight(f, Method::Limit).unwrap();
        assert!(
            direct.eq_exact(&limit).unwrap(),
            "volume mismatch {} vs {} over {}",
            direct.value,
            limit.value,
            f.levi()
        );
        checks += 1;
    }
    report(
        "2 (volume weight, direct == limit)",
        started,
        checks == 200,
        &format!("{checks} exact lattice-normalized equalities"),
    );
}

#[test]
fn criterion_3_polytope_equivalences() {
    let started = Instant::now();
    let o = suite::polytope_suite(SEED, 6, 1000, 10, &[2, 3, 4]);
    report(
        "3 (membership equivalences)",
        started,
        o.ok(),
        &format!(
            "{} families x 1000 points, {} checks, {} failures",
            o.cases,
            o.checks,
            o.failures.len()
        ),
    );
}

#[test]
fn criterion_4_nearest_point() {
    let started = Instant::now();
    let o = suite::hn_suite(SEED, 12, 1000, &[2, 3, 4]);
    report(
        "4 (nearest point)",
        started,
        o.ok(),
        &format!(
            "{} families, 1000 sampled polytope points each, {} checks",
            o.cases, o.checks
        ),
    );
}

#[test]
fn criterion_5_sum_identities() {
    let started = Instant::now();
    let o = suite::identity_suite(SEED, 100, &[2, 3]);
    report(
        "5 (coset-sum and reformulation identities)",
        started,
        o.ok() && o.cases == 200,
        &format!(
            "{} instances incl. shifted representatives, {} checks",
            o.cases, o.checks
        ),
    );
}

fn split_instance(q: u64, divisor: &[(&str, u32)], lambda: &str) -> CharDatum {
    let ff = FiniteField::new(q).unwrap();
    let d = divisor
        .iter()
        .map(|(s, m)| {
            (
                Place::finite(&ff, adelic::poly::parse_ratfunc(&ff, s).unwrap().num).unwrap(),
                *m,
            )
        })
        .collect();
    let lambda = adelic::poly::parse_ratfunc(&ff, lambda).unwrap();
    build_char(&ff, d, CharCase::SplitSl { lambda }).unwrap()
}

/// The counting instances: q in {3, 5}, deg(D) in {1, 2}, with ramification
/// at places of degree 1 and 2.
fn counting_instances() -> Vec<(CharDatum, Rat)> {
    vec![
        // q = 3, deg D = 1.
        (split_instance(3, &[("t", 1)], "(t+1)/t"), rat_i(1)),
        // q = 3, deg D = 2, ramified at an irreducible quadratic.
        (split_instance(3, &[("t", 2)], "(t^2+t+2)/t^2"), rat_i(8)),
        // q = 3, deg D = 2 split over two places of degree 1.
        (
            split_instance(3, &[("t", 1), ("t+1", 1)], "(t^2+1)/(t*(t+1))"),
            rat_i(8),
        ),
        // q = 5, deg D = 1.
        (split_instance(5, &[("t", 1)], "(t+1)/t"), rat_i(1)),
        // q = 5, deg D = 2 with two ramification places of degree 1.
        (
            split_instance(5, &[("t", 2)], "((t+1)*(t+2))/t^2"),
            rat_i(10),
        ),
        // Level two at one place: a double zero of the eigenvalue section.
        (split_instance(3, &[("t", 2)], "(t+1)^2/t^2"), rat_i(7)),
        (split_instance(5, &[("t", 2)], "(t+1)^2/t^2"), rat_i(11)),
        // Divisor support meeting the ramification locus: d = 1 and a
        // simple zero at the same place give level two as well.
        (
            split_instance(3, &[("t", 1), ("t+1", 1)], "(t+1)/t"),
            rat_i(7),
        ),
    ]
}

fn general_xis() -> Vec<Vec<Rat>> {
    vec![
        vec![rat(1, 2), rat(-1, 2)],
        vec![rat(7, 3), rat(-7, 3)],
        vec![rat(-9, 4), rat(9, 4)],
    ]
}

#[test]
fn criterion_6_fiber_count_two_pipelines() {
    let started = Instant::now();
    let instances = counting_instances();
    let mut lines = Vec::new();
    for (c, frozen) in &instances {
        let xi = &general_xis()[0];
        let direct = fiber_count_direct(c, xi).unwrap();
        // The formula evaluation asserts its internal w-form/v-form equality.
        let formula = fiber_count_formula(c, xi).unwrap();
        assert_eq!(&direct, &formula, "pipelines disagree on q={}", c.ff.q());
        assert_eq!(&direct, frozen, "regression value moved for q={}", c.ff.q());
        lines.push(format!(
            "q={} degD={} count={}",
            c.ff.q(),
            c.deg_divisor(),
            direct
        ));
    }
    report(
        "6 (fiber count, direct == formula)",
        started,
        instances.len() >= 3,
        &lines.join("; "),
    );
}

#[test]
fn criterion_7_xi_independence() {
    let started = Instant::now();
    let mut checks = 0;
    for (c, _) in &counting_instances() {
        let values: Vec<Rat> = general_xis()
            .iter()
            .map(|xi| fiber_count_formula(c, xi).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]));
        let directs: Vec<Rat> = general_xis()
            .iter()
            .map(|xi| fiber_count_direct(c, xi).unwrap())
            .collect();
        assert!(directs.windows(2).all(|w| w[0] == w[1]));
        checks += 1;
    }
    report(
        "7 (truncation independence)",
        started,
        checks == 8,
        &format!("{checks} instances x 3 general-position parameters"),
    );
}

#[test]
fn criterion_8_descent() {
    let started = Instant::now();
    let g = GroupData::new(2).unwrap();
    let b = Parabolic::new(&g, vec![vec![0], vec![1]]).unwrap();
    let bbar = Parabolic::new(&g, vec![vec![1], vec![0]]).unwrap();
    let mut spot_total = 0usize;
    for (c, _) in &counting_instances() {
        for q in [&b, &bbar] {
            let (lhs, rhs, spot) = descent_check(c, q).unwrap();
            assert_eq!(lhs, rhs, "descent fails on q={}", c.ff.q());
            spot_total += spot;
        }
        // The right side is q^{deg D} times the torus integral (= 1 here).
        let (lhs, _, _) = descent_check(c, &b).unwrap();
        let mut expect = rat_i(1);
        for _ in 0..c.deg_divisor() {
            expect *= rat_i(c.ff.q() as i64);
        }
        assert_eq!(lhs, expect);
    }
    report(
        "8 (descent identity)",
        started,
        spot_total >= 50,
        &format!("{spot_total} Iwasawa spot checks"),
    );
}

#[test]
fn criterion_9_positivity_and_bound() {
    let started = Instant::now();
    let g = GroupData::new(2).unwrap();
    let mut points = 0usize;
    for (c, _) in &counting_instances() {
        for pt in adelic::count::enumerate_points(c, 2).unwrap() {
            let fam = pt.family(&g).unwrap();
            let coeffs = validate_family(&fam).unwrap();
            let bound = rat_i(2 * c.deg_divisor());
            for x in coeffs.values() {
                assert!(
                    x >= &rat_i(0) && x <= &bound,
                    "coefficient {x} out of [0, {bound}]"
                );
            }
            assert!(gl2_bound_check(c, &pt).unwrap());
            points += 1;
        }
    }
    // The q = 2 layer instance exercises the bound too.
    let ff2 = FiniteField::new(2).unwrap();
    let t = Place::finite(&ff2, adelic::poly::parse_ratfunc(&ff2, "t").unwrap().num).unwrap();
    let c2 = build_char(
        &ff2,
        vec![(t, 1)],
        CharCase::Gl2Split {
            l1: adelic::poly::parse_ratfunc(&ff2, "(t+1)/t").unwrap(),
            l2: adelic::poly::parse_ratfunc(&ff2, "1/t").unwrap(),
        },
    )
    .unwrap();
    for pt in adelic::count::enumerate_points(&c2, 2).unwrap() {
        assert!(gl2_bound_check(&c2, &pt).unwrap());
        points += 1;
    }
    report(
        "9 (positivity and length bound)",
        started,
        points > 0,
        &format!("{points} enumerated adelic points"),
    );
}

#[test]
fn volumes_are_frozen_constants() {
    // Not numbered in the gate, but the normalization-specific regression
    // values the counting relies on: split 1/(q-1), elliptic 1/(q+1).
    let started = Instant::now();
    assert_eq!(
        vol_at(&split_instance(3, &[("t", 1)], "(t+1)/t")).unwrap(),
        rat(1, 2)
    );
    assert_eq!(
        vol_at(&split_instance(5, &[("t", 1)], "(t+1)/t")).unwrap(),
        rat(1, 4)
    );
    let ff = FiniteField::new(3).unwrap();
    let e = build_char(&ff, vec![], CharCase::Elliptic { c: ff.from_int(2) }).unwrap();
    assert_eq!(vol_at(&e).unwrap(), rat(1, 4));
    assert_eq!(
        fiber_count_direct(&e, &general_xis()[0]).unwrap(),
        rat(1, 4)
    );
    assert_eq!(
        fiber_count_formula(&e, &general_xis()[0]).unwrap(),
        rat(1, 4)
    );
    report(
        "volumes (frozen normalizations)",
        started,
        true,
        "split and elliptic",
    );
}
