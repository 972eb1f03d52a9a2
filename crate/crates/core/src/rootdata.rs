//! Exact type-A root-system combinatorics: the trace-zero ambient space of
//! SL(n), semi-standard Levi subgroups (set partitions of {1..n}),
//! semi-standard parabolic subgroups (ordered set partitions), simple
//! (co)root bases, orthogonal projections, cocharacter lattices and exact
//! covolume ratios.

use crate::ratmat::{self, dot, express_in_basis, rat_i, vadd, vscale, vsub, vzero, Rat};
use crate::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::fmt;

/// The SL(n) datum. The ambient space is the trace-zero subspace of Q^n with
/// the standard dot product; it is invariant under the permutation action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupData {
    n: usize,
}

impl GroupData {
    /// `make_group`: rejects n < 2.
    pub fn new(n: usize) -> Result<GroupData> {
        if n < 2 {
            return Err(Error::RankTooSmall(n));
        }
        Ok(GroupData { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the ambient trace-zero space.
    pub fn ambient_dim(&self) -> usize {
        self.n - 1
    }

    pub fn check_ambient(&self, v: &[Rat]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::NotInAmbient(format!(
                "expected {} coordinates, got {}",
                self.n,
                v.len()
            )));
        }
        let s: Rat = v.iter().sum();
        if !s.is_zero() {
            return Err(Error::NotInAmbient(format!("coordinate sum {s} != 0")));
        }
        Ok(())
    }

    /// Projects an arbitrary vector of Q^n to the trace-zero subspace; this is
    /// how GL(n) inputs enter the library.
    pub fn project_trace_zero(&self, v: &[Rat]) -> Vec<Rat> {
        let avg: Rat = v.iter().sum::<Rat>() / rat_i(self.n as i64);
        v.iter().map(|x| x - &avg).collect()
    }
}

/// A semi-standard Levi subgroup of SL(n): an unordered set partition of
/// {1,..,n}, stored 0-based with each block sorted and blocks sorted by their
/// least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Levi {
    blocks: Vec<Vec<usize>>,
}

impl Levi {
    pub fn new(g: &GroupData, blocks: Vec<Vec<usize>>) -> Result<Levi> {
        let mut seen = vec![false; g.n()];
        let mut bl: Vec<Vec<usize>> = Vec::new();
        for b in blocks {
            if b.is_empty() {
                return Err(Error::Schema("empty block in Levi".into()));
            }
            let mut b = b;
            b.sort_unstable();
            for &i in &b {
                if i >= g.n() || seen[i] {
                    return Err(Error::Schema(format!("bad or repeated index {i} in Levi")));
                }
                seen[i] = true;
            }
            bl.push(b);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Schema("Levi blocks do not cover {1..n}".into()));
        }
        bl.sort();
        Ok(Levi { blocks: bl })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// True when every block of `coarser` is a union of blocks of `self`.
    pub fn refines(&self, coarser: &Levi) -> bool {
        self.blocks.iter().all(|b| {
            coarser
                .blocks
                .iter()
                .any(|c| b.iter().all(|i| c.contains(i)))
        })
    }

    pub fn key(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Levi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// A semi-standard parabolic subgroup of SL(n): an ordered set partition of
/// {1,..,n}. The underlying Levi forgets the order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Parabolic {
    order: Vec<Vec<usize>>,
}

impl Parabolic {
    pub fn new(g: &GroupData, order: Vec<Vec<usize>>) -> Result<Parabolic> {
        let mut seen = vec![false; g.n()];
        let mut ord = Vec::new();
        for b in order {
            if b.is_empty() {
                return Err(Error::Schema("empty block in parabolic".into()));
            }
            let mut b = b;
            b.sort_unstable();
            for &i in &b {
                if i >= g.n() || seen[i] {
                    return Err(Error::Schema(format!(
                        "bad or repeated index {i} in parabolic"
                    )));
                }
                seen[i] = true;
            }
            ord.push(b);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Schema("parabolic blocks do not cover {1..n}".into()));
        }
        Ok(Parabolic { order: ord })
    }

    pub fn order(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn num_blocks(&self) -> usize {
        self.order.len()
    }

    pub fn levi(&self) -> Levi {
        let mut blocks = self.order.clone();
        blocks.sort();
        Levi { blocks }
    }

    pub fn is_full_group(&self) -> bool {
        self.order.len() == 1
    }

    /// True when `self` is contained in `q` as a parabolic subgroup, i.e. the
    /// order of `self` refines the order of `q` block by block.
    pub fn contained_in(&self, q: &Parabolic) -> bool {
        let mut mine = self.order.iter();
        for qb in &q.order {
            let mut collected: Vec<usize> = Vec::new();
            while collected.len() < qb.len() {
                match mine.next() {
                    Some(b) => collected.extend(b.iter().copied()),
                    None => return false,
                }
            }
            collected.sort_unstable();
            if &collected != qb {
                return false;
            }
        }
        mine.next().is_none()
    }

    /// Serialization key, e.g. "1,2|3".
    pub fn key(&self) -> String {
        self.order
            .iter()
            .map(|b| {
                b.iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn from_key(g: &GroupData, key: &str) -> Result<Parabolic> {
        let order: Vec<Vec<usize>> = key
            .split('|')
            .map(|b| {
                b.split(',')
                    .map(|i| {
                        i.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("bad index {i:?}: {e}")))
                            .and_then(|k| {
                                if k == 0 {
                                    Err(Error::Parse("indices are 1-based".into()))
                                } else {
                                    Ok(k - 1)
                                }
                            })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Parabolic::new(g, order)
    }
}

impl fmt::Display for Parabolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let rest = &items[1..];
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        // Insert `first` into each existing block or as a new block.
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![first]);
        out.push(q);
    }
    out
}

/// `enumerate_levis`: all set partitions of {1..n}; Bell(n) of them.
pub fn enumerate_levis(g: &GroupData) -> Vec<Levi> {
    let items: Vec<usize> = (0..g.n()).collect();
    let mut out: Vec<Levi> = set_partitions(&items)
        .into_iter()
        .map(|p| Levi::new(g, p).expect("generated partition is valid"))
        .collect();
    out.sort();
    out
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// Ordered set partitions of a collection of blocks (used to coarsen a Levi).
fn ordered_partitions_of_blocks(blocks: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let idx: Vec<usize> = (0..blocks.len()).collect();
    let mut out = Vec::new();
    for p in set_partitions(&idx) {
        for arrangement in permutations(&p) {
            let merged: Vec<Vec<usize>> = arrangement
                .iter()
                .map(|group| {
                    let mut m: Vec<usize> = group
                        .iter()
                        .flat_map(|&b| blocks[b].iter().copied())
                        .collect();
                    m.sort_unstable();
                    m
                })
                .collect();
            out.push(merged);
        }
    }
    out
}

/// P(M): all orderings of the blocks of M.
pub fn p_of(g: &GroupData, m: &Levi) -> Vec<Parabolic> {
    let mut out: Vec<Parabolic> = permutations(m.blocks())
        .into_iter()
        .map(|ord| Parabolic::new(g, ord).expect("permutation of valid blocks"))
        .collect();
    out.sort();
    out
}

/// F(M): all parabolics containing M, i.e. ordered coarsenings of its blocks.
pub fn f_of(g: &GroupData, m: &Levi) -> Vec<Parabolic> {
    use std::collections::BTreeMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<BTreeMap<(usize, Levi), Vec<Parabolic>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let key = (g.n(), m.clone());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut out: Vec<Parabolic> = ordered_partitions_of_blocks(m.blocks())
        .into_iter()
        .map(|ord| Parabolic::new(g, ord).expect("coarsening of valid blocks"))
        .collect();
    out.sort();
    out.dedup();
    cache.lock().unwrap().insert(key, out.clone());
    out
}

/// `parabolics_over`: P(M) and F(M), optionally restricted to parabolics
/// contained in Q.
pub fn parabolics_over(
    g: &GroupData,
    m: &Levi,
    q: Option<&Parabolic>,
) -> Result<(Vec<Parabolic>, Vec<Parabolic>)> {
    if let Some(q) = q {
        if !m.refines(&q.levi()) {
            return Err(Error::IncompatiblePair);
        }
        let p = p_of(g, m)
            .into_iter()
            .filter(|x| x.contained_in(q))
            .collect();
        let f = f_of(g, m)
            .into_iter()
            .filter(|x| x.contained_in(q))
            .collect();
        Ok((p, f))
    } else {
        Ok((p_of(g, m), f_of(g, m)))
    }
}

/// Maximal proper parabolics containing M: the two-block coarsenings.
pub fn maximal_proper_over(g: &GroupData, m: &Levi) -> Vec<Parabolic> {
    f_of(g, m)
        .into_iter()
        .filter(|p| p.num_blocks() == 2)
        .collect()
}

/// Simple roots, simple coroots and the dual (fundamental-weight) basis of a
/// parabolic. Covectors are represented by the vectors pairing against them
/// under the standard dot product; for P = G all three lists are empty.
#[derive(Debug, Clone)]
pub struct RootBases {
    /// Simple roots of A_P, as pairing vectors in a_P.
    pub simple_roots: Vec<Vec<Rat>>,
    /// Simple coroots: the basis Delta_P^vee of a_P.
    pub simple_coroots: Vec<Vec<Rat>>,
    /// The basis of a_P^* dual to the coroots, as pairing vectors.
    pub dual_basis: Vec<Vec<Rat>>,
}

/// The vector with 1/|B_i| on block i and -1/|B_j| on block j.
fn block_coroot(n: usize, bi: &[usize], bj: &[usize]) -> Vec<Rat> {
    let mut v = vzero(n);
    let ci = Rat::one() / rat_i(bi.len() as i64);
    let cj = Rat::one() / rat_i(bj.len() as i64);
    for &a in bi {
        v[a] = ci.clone();
    }
    for &b in bj {
        v[b] = -cj.clone();
    }
    v
}

pub fn root_bases(g: &GroupData, p: &Parabolic) -> RootBases {
    use std::collections::BTreeMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<BTreeMap<(usize, Vec<Vec<usize>>), RootBases>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let key = (g.n(), p.order().to_vec());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let computed = root_bases_uncached(g, p);
    cache.lock().unwrap().insert(key, computed.clone());
    computed
}

fn root_bases_uncached(g: &GroupData, p: &Parabolic) -> RootBases {
    let s = p.num_blocks();
    if s <= 1 {
        return RootBases {
            simple_roots: vec![],
            simple_coroots: vec![],
            dual_basis: vec![],
        };
    }
    let coroots: Vec<Vec<Rat>> = (0..s - 1)
        .map(|i| block_coroot(g.n(), &p.order()[i], &p.order()[i + 1]))
        .collect();
    // In this inner product the restricted simple root alpha_i pairs as the
    // coroot vector itself: <alpha_i^vee, v> = v|B_i - v|B_{i+1} for v in a_P.
    let simple_roots = coroots.clone();
    // Dual basis: solve G x = e_i with G the Gram matrix of the coroots.
    let gram: Vec<Vec<Rat>> = coroots
        .iter()
        .map(|a| coroots.iter().map(|b| dot(a, b)).collect())
        .collect();
    let mut dual = Vec::new();
    for i in 0..s - 1 {
        let mut e = vzero(s - 1);
        e[i] = Rat::one();
        let gram_cols: Vec<Vec<Rat>> = (0..s - 1)
            .map(|j| (0..s - 1).map(|k| gram[k][j].clone()).collect())
            .collect();
        let x = express_in_basis(&gram_cols, &e).expect("Gram matrix of a basis is invertible");
        let mut w = vzero(g.n());
        for (j, c) in x.iter().enumerate() {
            w = vadd(&w, &vscale(c, &coroots[j]));
        }
        dual.push(w);
    }
    RootBases {
        simple_roots,
        simple_coroots: coroots,
        dual_basis: dual,
    }
}

/// Which component of the orthogonal decomposition v = v^P + v_P to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjPart {
    /// v_P: the block-average part lying in a_P.
    OntoLevi,
    /// v^P: the complementary part lying in a_T^P.
    OntoComplement,
}

/// Orthogonal projection with respect to the blocks of a Levi.
pub fn project_levi(g: &GroupData, v: &[Rat], m: &Levi, part: ProjPart) -> Result<Vec<Rat>> {
    g.check_ambient(v)?;
    let mut avg = vzero(g.n());
    for b in m.blocks() {
        let s: Rat = b.iter().map(|&i| v[i].clone()).sum();
        let a = s / rat_i(b.len() as i64);
        for &i in b {
            avg[i] = a.clone();
        }
    }
    Ok(match part {
        ProjPart::OntoLevi => avg,
        ProjPart::OntoComplement => vsub(v, &avg),
    })
}

/// `project`: orthogonal decomposition along a parabolic (which only depends
/// on its Levi).
pub fn project(g: &GroupData, v: &[Rat], p: &Parabolic, part: ProjPart) -> Result<Vec<Rat>> {
    project_levi(g, v, &p.levi(), part)
}

/// `adjacency_coroot`: the wall coroot of two adjacent elements of P(M).
/// Adjacency means the acute chambers share a codimension-one wall, which
/// for ordered block partitions is exactly a transposition of two
/// consecutive blocks; the shared coroot is then the unique element of
/// Delta_P^vee n (-Delta_P'^vee). (From n = 4 on, that intersection can be
/// a singleton for non-neighboring chambers too, so the wall condition is
/// the operative one.)
pub fn adjacency_coroot(g: &GroupData, p: &Parabolic, p2: &Parabolic) -> Result<Option<Vec<Rat>>> {
    if p.levi() != p2.levi() {
        return Err(Error::DifferentLevis);
    }
    let a = p.order();
    let b = p2.order();
    let diffs: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    if diffs.len() != 2 || diffs[1] != diffs[0] + 1 {
        return Ok(None);
    }
    let i = diffs[0];
    if a[i] != b[i + 1] || a[i + 1] != b[i] {
        return Ok(None);
    }
    let coroot = block_coroot(g.n(), &a[i], &a[i + 1]);
    // The wall coroot is the unique common element of the two coroot bases
    // up to sign.
    debug_assert!(root_bases(g, p).simple_coroots.contains(&coroot));
    debug_assert!(root_bases(g, p2)
        .simple_coroots
        .contains(&coroot.iter().map(|x| -x.clone()).collect::<Vec<_>>()));
    Ok(Some(coroot))
}

/// A lattice in a rational subspace of the ambient space, given by a Z-basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeQ {
    basis: Vec<Vec<Rat>>,
}

impl LatticeQ {
    pub fn new(basis: Vec<Vec<Rat>>) -> Result<LatticeQ> {
        if ratmat::rank(&basis) != basis.len() {
            return Err(Error::Schema("lattice basis is linearly dependent".into()));
        }
        Ok(LatticeQ { basis })
    }

    /// Lattice generated by a (possibly dependent) set of rational vectors.
    pub fn from_generators(gens: &[Vec<Rat>]) -> LatticeQ {
        let gens: Vec<Vec<Rat>> = gens
            .iter()
            .filter(|v| !ratmat::is_zero_vec(v))
            .cloned()
            .collect();
        if gens.is_empty() {
            return LatticeQ { basis: vec![] };
        }
        let d = ratmat::common_denominator(&gens);
        let int_rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|row| row.iter().map(|x| x.numer() * (&d / x.denom())).collect())
            .collect();
        let h = ratmat::hnf_rows(&int_rows);
        let dr = Rat::from(d);
        let basis = h
            .into_iter()
            .map(|row| row.into_iter().map(|x| Rat::from(x) / dr.clone()).collect())
            .collect();
        LatticeQ { basis }
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if ratmat::is_zero_vec(v) {
            return true;
        }
        match express_in_basis(&self.basis, v) {
            Some(coords) => coords.iter().all(|c| c.is_integer()),
            None => false,
        }
    }

    pub fn same_span(&self, other: &LatticeQ) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        self.basis
            .iter()
            .all(|v| express_in_basis(&other.basis, v).is_some())
    }

    pub fn contains_lattice(&self, other: &LatticeQ) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

/// Which cocharacter lattice of a Levi to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// X_*(M): the block-average image of the cocharacter lattice of T.
    Full,
    /// X_*(M_scnx): the Z-span of the simple coroots of any P in P(M).
    Scnx,
}

/// `cochar_lattice`.
pub fn cochar_lattice(g: &GroupData, m: &Levi, kind: LatticeKind) -> LatticeQ {
    match kind {
        LatticeKind::Scnx => {
            let p = p_of(g, m).into_iter().next().expect("P(M) nonempty");
            LatticeQ::from_generators(&root_bases(g, &p).simple_coroots)
        }
        LatticeKind::Full => {
            // X_*(T) = {v in Z^n : sum v = 0} is generated by e_i - e_{i+1};
            // push these through the block-average projection.
            let mut gens = Vec::new();
            for i in 0..g.n() - 1 {
                let mut v = vzero(g.n());
                v[i] = Rat::one();
                v[i + 1] = -Rat::one();
                gens.push(project_levi(g, &v, m, ProjPart::OntoLevi).expect("integral vector"));
            }
            LatticeQ::from_generators(&gens)
        }
    }
}

/// `covolume_ratio`: |det| of the change of basis from B to A; equals
/// covol(A)/covol(B) for any inner product. Errors when the spans differ.
pub fn covolume_ratio(a: &LatticeQ, b: &LatticeQ) -> Result<Rat> {
    if a.rank() != b.rank() {
        return Err(Error::DifferentSpans);
    }
    if a.rank() == 0 {
        return Ok(Rat::one());
    }
    let mut rows = Vec::new();
    for v in a.basis() {
        let coords = express_in_basis(b.basis(), v).ok_or(Error::DifferentSpans)?;
        rows.push(coords);
    }
    // Also require b ⊂ span(a) so the spans genuinely agree.
    for v in b.basis() {
        if express_in_basis(a.basis(), v).is_none() {
            return Err(Error::DifferentSpans);
        }
    }
    Ok(ratmat::det(&rows).abs())
}

/// `is_general_position`: xi is in general position when its projection to
/// every proper parabolic subspace misses the cocharacter lattice; by the
/// block structure it suffices to test the maximal (two-block) parabolics.
pub fn is_general_position(g: &GroupData, xi: &[Rat]) -> Result<bool> {
    g.check_ambient(xi)?;
    let t = Levi::new(g, (0..g.n()).map(|i| vec![i]).collect())?;
    for p in maximal_proper_over(g, &t) {
        let m = p.levi();
        let proj = project_levi(g, xi, &m, ProjPart::OntoLevi)?;
        if cochar_lattice(g, &m, LatticeKind::Full).contains(&proj) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force variant over all proper parabolics in F(T); used as the oracle
/// for `is_general_position`.
pub fn is_general_position_all(g: &GroupData, xi: &[Rat]) -> Result<bool> {
    g.check_ambient(xi)?;
    let t = Levi::new(g, (0..g.n()).map(|i| vec![i]).collect())?;
    for p in f_of(g, &t) {
        if p.is_full_group() {
            continue;
        }
        let m = p.levi();
        let proj = project_levi(g, xi, &m, ProjPart::OntoLevi)?;
        if cochar_lattice(g, &m, LatticeKind::Full).contains(&proj) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The minimal Levi T (all blocks singletons).
pub fn torus(g: &GroupData) -> Levi {
    Levi::new(g, (0..g.n()).map(|i| vec![i]).collect()).expect("singleton partition")
}

/// The full group as a Levi (one block).
pub fn full_levi(g: &GroupData) -> Levi {
    Levi::new(g, vec![(0..g.n()).collect()]).expect("one-block partition")
}


#[cfg(test)]
mod restriction_tests {
    use super::*;
    use crate::ratmat::rat_i;

    #[test]
    fn parabolics_over_with_restriction() {
        let g3 = GroupData::new(3).unwrap();
        let t = torus(&g3);
        let q = Parabolic::new(&g3, vec![vec![0, 1], vec![2]]).unwrap();
        let (p, f) = parabolics_over(&g3, &t, Some(&q)).unwrap();
        // Orderings of singletons refining ({1,2},{3}): (1,2,3) and (2,1,3).
        assert_eq!(p.len(), 2);
        // F(T) inside Q: those two plus Q itself.
        assert_eq!(f.len(), 3);
        assert!(f.contains(&q));
        // Incompatible pair: M has a block crossing the blocks of Q.
        let m = Levi::new(&g3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(matches!(
            parabolics_over(&g3, &m, Some(&q)),
            Err(Error::IncompatiblePair)
        ));
        // Without restriction both sets come back whole.
        let (p_all, f_all) = parabolics_over(&g3, &t, None).unwrap();
        assert_eq!(p_all.len(), 6);
        assert_eq!(f_all.len(), 13);
    }

    #[test]
    fn covolume_ratio_rejects_different_spans() {
        let a = LatticeQ::new(vec![vec![rat_i(1), rat_i(-1), rat_i(0)]]).unwrap();
        let b = LatticeQ::new(vec![vec![rat_i(0), rat_i(1), rat_i(-1)]]).unwrap();
        assert!(matches!(covolume_ratio(&a, &b), Err(Error::DifferentSpans)));
    }
}
