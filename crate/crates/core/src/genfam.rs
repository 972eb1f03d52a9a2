//! Seeded random generation of valid positive orthogonal families. Families
//! are sums of coverage bricks: for a subset A of the blocks of M, the
//! brick sends an ordering P to the normalized indicator of the first
//! A-block in that order (centered into a_M). Crossing a wall either fixes
//! the first A-block or moves it across the swapped pair, so the brick is
//! positive orthogonal with wall coefficients in {0, w}; sums and lattice
//! translations of valid families stay valid.

use crate::polytope::PositiveOrthogonalFamily;
use crate::ratmat::{rat, rat_i, vadd, vscale, vsub, vzero, Rat};
use crate::rootdata::{
    cochar_lattice, enumerate_levis, is_general_position, p_of, project_levi, GroupData,
    LatticeKind, Levi, Parabolic, ProjPart,
};
use rand::Rng;
use std::collections::BTreeMap;

/// The vector with 1/|B| on the block B and 0 elsewhere, centered to trace
/// zero (hence lying in a_M).
fn block_indicator(g: &GroupData, block: &[usize]) -> Vec<Rat> {
    let mut v = vzero(g.n());
    for &a in block {
        v[a] = rat(1, block.len() as i64);
    }
    g.project_trace_zero(&v)
}

fn first_block_of(p: &Parabolic, members: &[bool]) -> usize {
    p.order()
        .iter()
        .position(|b| {
            // Membership is tracked by the least element of the block.
            members[b[0]]
        })
        .expect("A nonempty")
}

/// The coverage brick attached to a subset A of blocks with weight w:
/// P |-> w * indicator(first A-block in the order of P).
fn coverage_brick(g: &GroupData, m: &Levi, in_a: &[bool], w: i64) -> BTreeMap<Parabolic, Vec<Rat>> {
    // Mark membership by least block element for a fast per-order lookup.
    let mut members = vec![false; g.n()];
    for (bi, b) in m.blocks().iter().enumerate() {
        if in_a[bi] {
            members[b[0]] = true;
        }
    }
    p_of(g, m)
        .into_iter()
        .map(|p| {
            let k = first_block_of(&p, &members);
            let y = vscale(&rat_i(w), &block_indicator(g, &p.order()[k]));
            (p, y)
        })
        .collect()
}

fn add_pointwise(acc: &mut BTreeMap<Parabolic, Vec<Rat>>, brick: &BTreeMap<Parabolic, Vec<Rat>>) {
    for (p, y) in brick {
        let e = acc.get_mut(p).expect("same parabolic set");
        *e = vadd(e, y);
    }
}

/// Uniform random Levi of SL(n), optionally excluding the full group.
pub fn random_levi<R: Rng>(rng: &mut R, g: &GroupData, allow_full: bool) -> Levi {
    let levis: Vec<Levi> = enumerate_levis(g)
        .into_iter()
        .filter(|m| allow_full || m.num_blocks() > 1)
        .collect();
    levis[rng.gen_range(0..levis.len())].clone()
}

/// Random rational vector of a_M with denominators up to `den`.
pub fn random_levi_vector<R: Rng>(rng: &mut R, g: &GroupData, m: &Levi, den: i64) -> Vec<Rat> {
    let raw: Vec<Rat> = (0..g.n())
        .map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=den)))
        .collect();
    let v = g.project_trace_zero(&raw);
    project_levi(g, &v, m, ProjPart::OntoLevi).expect("ambient")
}

/// Random valid positive orthogonal family over M. With `integral` set, all
/// points land in the coroot lattice X_*(M_scnx), as required by the limit
/// route of the lattice-count weight.
pub fn random_family<R: Rng>(
    rng: &mut R,
    g: &GroupData,
    m: &Levi,
    integral: bool,
    max_coeff: i64,
) -> PositiveOrthogonalFamily {
    let paras = p_of(g, m);
    let mut acc: BTreeMap<Parabolic, Vec<Rat>> =
        paras.iter().map(|p| (p.clone(), vzero(g.n()))).collect();
    let s = m.num_blocks();
    if s > 1 {
        let bricks = rng.gen_range(1..=3usize);
        for _ in 0..bricks {
            // A random subset of blocks with at least two elements.
            let mut in_a = vec![false; s];
            while in_a.iter().filter(|x| **x).count() < 2 {
                for x in in_a.iter_mut() {
                    *x = rng.gen_bool(0.5);
                }
            }
            let w = rng.gen_range(1..=max_coeff.max(1));
            add_pointwise(&mut acc, &coverage_brick(g, m, &in_a, w));
        }
    }
    if integral {
        // Translate so that a fixed vertex is a random lattice point; every
        // other vertex differs by integer multiples of coroots.
        let lat = cochar_lattice(g, m, LatticeKind::Scnx);
        let mut target = vzero(g.n());
        for b in lat.basis() {
            target = vadd(&target, &vscale(&rat_i(rng.gen_range(-3..=3)), b));
        }
        let base = acc[&paras[0]].clone();
        let shift = vsub(&target, &base);
        for y in acc.values_mut() {
            *y = vadd(y, &shift);
        }
    } else {
        // Rational rescale plus an arbitrary a_M translation.
        let sc = rat(rng.gen_range(1..=5), rng.gen_range(1..=4));
        let shift = random_levi_vector(rng, g, m, 4);
        for y in acc.values_mut() {
            *y = vadd(&vscale(&sc, y), &shift);
        }
    }
    let fam =
        PositiveOrthogonalFamily::new(g.clone(), m.clone(), acc).expect("brick sums stay in a_M");
    debug_assert!(crate::polytope::validate_family(&fam).is_ok());
    fam
}

/// Random truncation vector; with `general` set, resamples until it is in
/// general position.
pub fn random_xi<R: Rng>(rng: &mut R, g: &GroupData, general: bool) -> Vec<Rat> {
    loop {
        let raw: Vec<Rat> = (0..g.n())
            .map(|_| rat(rng.gen_range(-12..=12), rng.gen_range(2..=7)))
            .collect();
        let xi = g.project_trace_zero(&raw);
        if !general || is_general_position(g, &xi).unwrap_or(false) {
            return xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::validate_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bricks_are_valid_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4usize {
            let g = GroupData::new(n).unwrap();
            for _ in 0..20 {
                let m = random_levi(&mut rng, &g, true);
                let f = random_family(&mut rng, &g, &m, true, 3);
                validate_family(&f).unwrap();
                let f2 = random_family(&mut rng, &g, &m, false, 3);
                validate_family(&f2).unwrap();
            }
        }
    }

    #[test]
    fn single_coverage_bricks_are_valid() {
        // Exhaustive over all block subsets for the full torus, n <= 4.
        for n in 2..=4usize {
            let g = GroupData::new(n).unwrap();
            let m = crate::rootdata::torus(&g);
            for mask in 1u32..(1 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let in_a: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
                let brick = coverage_brick(&g, &m, &in_a, 2);
                let fam = PositiveOrthogonalFamily::new(g.clone(), m.clone(), brick).unwrap();
                validate_family(&fam).unwrap();
            }
        }
    }

    #[test]
    fn integral_families_hit_the_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4usize {
            let g = GroupData::new(n).unwrap();
            for _ in 0..10 {
                let m = random_levi(&mut rng, &g, false);
                let f = random_family(&mut rng, &g, &m, true, 3);
                let scnx = cochar_lattice(&g, &m, LatticeKind::Scnx);
                for y in f.points().values() {
                    assert!(scnx.contains(y));
                }
            }
        }
    }
}
