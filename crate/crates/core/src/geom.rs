//! Exact rational convex geometry on small point sets: feasibility of a
//! convex-combination system by two-phase simplex, and exact volumes of
//! convex hulls in dimension at most three.

use crate::ratmat::{dot, rat_i, vsub, Rat};
use num::{One, Signed, Zero};

/// Decides feasibility of `sum_i l_i p_i = target, sum_i l_i = 1, l_i >= 0`
/// by phase-one simplex with Bland's rule, after deduplication and a
/// coordinate bounding-box rejection.
pub fn convex_combination_feasible(points: &[Vec<Rat>], target: &[Rat]) -> bool {
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    let points = &pts[..];
    let m = points.len();
    if m == 0 {
        return false;
    }
    let d = target.len();
    // Outside the coordinate box means outside the hull.
    for c in 0..d {
        let mut lo = points[0][c].clone();
        let mut hi = lo.clone();
        for p in &points[1..] {
            if p[c] < lo {
                lo = p[c].clone();
            }
            if p[c] > hi {
                hi = p[c].clone();
            }
        }
        if target[c] < lo || target[c] > hi {
            return false;
        }
    }
    let rows = d + 1;
    // Constraint matrix: columns are the lambda variables, then one
    // artificial variable per row. rhs made nonnegative row by row.
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(rows);
    let mut b: Vec<Rat> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<Rat> = Vec::with_capacity(m);
        for p in points {
            row.push(if r < d { p[r].clone() } else { Rat::one() });
        }
        let rhs = if r < d { target[r].clone() } else { Rat::one() };
        if rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b.push(-rhs);
        } else {
            b.push(rhs);
        }
        a.push(row);
    }
    // Tableau with artificial basis; minimize the sum of artificials.
    let ncols = m + rows;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(rows + 1);
    for r in 0..rows {
        let mut row = a[r].clone();
        for k in 0..rows {
            row.push(if k == r { Rat::one() } else { Rat::zero() });
        }
        row.push(b[r].clone());
        t.push(row);
    }
    // Objective row: z = sum of artificial rows (so reduced costs start correct).
    let mut obj = vec![Rat::zero(); ncols + 1];
    for r in 0..rows {
        for c in 0..=ncols {
            obj[c] = &obj[c] + &t[r][c];
        }
    }
    for k in 0..rows {
        obj[m + k] = Rat::zero();
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();
    loop {
        // Bland: entering = smallest index with positive reduced cost.
        let Some(enter) = (0..ncols).find(|&c| obj[c].is_positive()) else {
            break;
        };
        // Ratio test, Bland tie-break by smallest basis index.
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..rows {
            if t[r][enter].is_positive() {
                let ratio = &t[r][ncols] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((lr, _)) = leave else {
            // Unbounded phase-one objective cannot happen; treat as infeasible.
            return false;
        };
        // Pivot.
        let piv = t[lr][enter].clone();
        for c in 0..=ncols {
            t[lr][c] = &t[lr][c] / &piv;
        }
        for r in 0..rows {
            if r != lr && !t[r][enter].is_zero() {
                let f = t[r][enter].clone();
                for c in 0..=ncols {
                    let sub = &f * &t[lr][c];
                    t[r][c] = &t[r][c] - sub;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for c in 0..=ncols {
                let sub = &f * &t[lr][c];
                obj[c] = &obj[c] - sub;
            }
        }
        basis[lr] = enter;
    }
    obj[ncols].is_zero()
}

fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rat>> = points[1..].iter().map(|p| vsub(p, &points[0])).collect();
    crate::ratmat::rank(&diffs)
}

fn cross3(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn hull2d(points: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    // Andrew's monotone chain; exact orientation tests.
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let orient = |o: &[Rat], a: &[Rat], b: &[Rat]| -> Rat {
        (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
    };
    let mut lower: Vec<Vec<Rat>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Rat>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn area2d(points: &[Vec<Rat>]) -> Rat {
    let hull = hull2d(points);
    if hull.len() < 3 {
        return Rat::zero();
    }
    let mut s = Rat::zero();
    for i in 0..hull.len() {
        let j = (i + 1) % hull.len();
        s += &hull[i][0] * &hull[j][1] - &hull[j][0] * &hull[i][1];
    }
    s.abs() / rat_i(2)
}

fn volume3d(points: &[Vec<Rat>]) -> Rat {
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    let n = pts.len();
    // Collect supporting planes from point triples.
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    struct PlaneKey(Vec<Rat>, Rat);
    let mut planes: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut seen: std::collections::BTreeSet<PlaneKey> = std::collections::BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let u = vsub(&pts[j], &pts[i]);
                let v = vsub(&pts[k], &pts[i]);
                let nrm = cross3(&u, &v);
                if nrm.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let off = dot(&nrm, &pts[i]);
                let mut side_pos = false;
                let mut side_neg = false;
                for p in &pts {
                    let s = dot(&nrm, p) - off.clone();
                    if s.is_positive() {
                        side_pos = true;
                    } else if s.is_negative() {
                        side_neg = true;
                    }
                    if side_pos && side_neg {
                        break;
                    }
                }
                if side_pos && side_neg {
                    continue;
                }
                // Outward orientation.
                let (nrm, off) = if side_pos {
                    (nrm.iter().map(|x| -x.clone()).collect::<Vec<_>>(), -off)
                } else {
                    (nrm, off)
                };
                // Canonical primitive form for dedup.
                let mut key_n = nrm.clone();
                let mut key_o = off.clone();
                let denom_lcm = key_n
                    .iter()
                    .chain(std::iter::once(&key_o))
                    .fold(num::BigInt::one(), |acc, x| {
                        num::integer::lcm(acc, x.denom().clone())
                    });
                let scale = Rat::from(denom_lcm);
                for x in key_n.iter_mut() {
                    *x = &*x * &scale;
                }
                key_o = &key_o * &scale;
                let gcd_all = key_n
                    .iter()
                    .chain(std::iter::once(&key_o))
                    .fold(num::BigInt::zero(), |acc, x| {
                        num::integer::gcd(acc, x.numer().clone())
                    });
                if !gcd_all.is_zero() {
                    let scale = Rat::from(gcd_all).recip();
                    for x in key_n.iter_mut() {
                        *x = &*x * &scale;
                    }
                    key_o = &key_o * &scale;
                }
                if seen.insert(PlaneKey(key_n.clone(), key_o.clone())) {
                    planes.push((key_n, key_o));
                }
            }
        }
    }
    // Reference origin for the cone decomposition.
    let o = &pts[0];
    let mut vol = Rat::zero();
    for (nrm, off) in &planes {
        // Points on the facet.
        let facet: Vec<Vec<Rat>> = pts
            .iter()
            .filter(|p| dot(nrm, p) == off.clone())
            .cloned()
            .collect();
        if facet.len() < 3 {
            continue;
        }
        // 2D coordinates inside the facet plane.
        let b1 = vsub(&facet[1], &facet[0]);
        let b2_raw = vsub(
            facet
                .iter()
                .skip(2)
                .find(|p| !cross3(&b1, &vsub(p, &facet[0])).iter().all(|x| x.is_zero()))
                .expect("facet spans a plane"),
            &facet[0],
        );
        // Orthogonalize b2 against b1 for a nondegenerate chart.
        let c = dot(&b1, &b2_raw) / dot(&b1, &b1);
        let b2: Vec<Rat> = (0..3).map(|i| &b2_raw[i] - &(&c * &b1[i])).collect();
        let chart: Vec<Vec<Rat>> = facet
            .iter()
            .map(|p| {
                let d0 = vsub(p, &facet[0]);
                vec![dot(&d0, &b1), dot(&d0, &b2)]
            })
            .collect();
        let hull_2d = hull2d(&chart);
        if hull_2d.len() < 3 {
            continue;
        }
        // Map hull order back to 3D points.
        let back: Vec<Vec<Rat>> = hull_2d
            .iter()
            .map(|c2| {
                let idx = chart.iter().position(|c| c == c2).expect("chart point");
                facet[idx].clone()
            })
            .collect();
        // Signed cone volume from o over the facet, fan-triangulated.
        let mut facet_vol = Rat::zero();
        for i in 1..back.len() - 1 {
            let a = vsub(&back[0], o);
            let b = vsub(&back[i], o);
            let c = vsub(&back[i + 1], o);
            facet_vol += dot(&cross3(&a, &b), &c);
        }
        // Consistent outward sign: det(a,b,c) relative to the outward normal.
        // The fan above may traverse the polygon in either direction; fix by
        // comparing the polygon normal with the outward plane normal.
        let a01 = vsub(&back[1], &back[0]);
        let a02 = vsub(&back[2], &back[0]);
        let poly_nrm = cross3(&a01, &a02);
        let sgn = dot(&poly_nrm, nrm);
        if sgn.is_negative() {
            facet_vol = -facet_vol;
        }
        vol += facet_vol;
    }
    vol.abs() / rat_i(6)
}

/// Exact volume of the convex hull of `points` in R^d for d <= 3, with the
/// convention that a point set in R^0 has volume 1. Degenerate (lower
/// dimensional) hulls have volume 0.
pub fn polytope_volume(points: &[Vec<Rat>]) -> Rat {
    assert!(!points.is_empty(), "volume of an empty point set");
    let d = points[0].len();
    if d == 0 {
        return Rat::one();
    }
    if affine_rank(points) < d {
        return Rat::zero();
    }
    match d {
        1 => {
            let mut vals: Vec<Rat> = points.iter().map(|p| p[0].clone()).collect();
            vals.sort();
            vals.last().unwrap() - vals.first().unwrap()
        }
        2 => area2d(points),
        3 => volume3d(points),
        _ => unimplemented!("exact volume only implemented through dimension 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat;

    fn v2(a: i64, b: i64) -> Vec<Rat> {
        vec![rat_i(a), rat_i(b)]
    }

    #[test]
    fn feasibility_interval() {
        let pts = vec![vec![rat_i(0)], vec![rat_i(3)]];
        assert!(convex_combination_feasible(&pts, &[rat(3, 2)]));
        assert!(convex_combination_feasible(&pts, &[rat_i(0)]));
        assert!(!convex_combination_feasible(&pts, &[rat_i(4)]));
        assert!(!convex_combination_feasible(&pts, &[rat_i(-1)]));
    }

    #[test]
    fn feasibility_triangle() {
        let pts = vec![v2(0, 0), v2(2, 0), v2(0, 2)];
        assert!(convex_combination_feasible(&pts, &[rat(1, 2), rat(1, 2)]));
        assert!(convex_combination_feasible(&pts, &[rat_i(1), rat_i(1)]));
        assert!(!convex_combination_feasible(&pts, &[rat_i(2), rat_i(2)]));
        assert!(!convex_combination_feasible(
            &pts,
            &[rat(-1, 100), rat_i(0)]
        ));
    }

    #[test]
    fn volumes() {
        assert_eq!(polytope_volume(&[vec![rat_i(0)], vec![rat_i(3)]]), rat_i(3));
        let square = vec![v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)];
        assert_eq!(polytope_volume(&square), rat_i(1));
        let tri = vec![v2(0, 0), v2(2, 0), v2(0, 2), v2(1, 1)];
        assert_eq!(polytope_volume(&tri), rat_i(2));
        let degenerate = vec![v2(0, 0), v2(1, 1), v2(2, 2)];
        assert_eq!(polytope_volume(&degenerate), rat_i(0));

        let cube: Vec<Vec<Rat>> = (0..8)
            .map(|k| vec![rat_i(k & 1), rat_i((k >> 1) & 1), rat_i((k >> 2) & 1)])
            .collect();
        assert_eq!(polytope_volume(&cube), rat_i(1));
        let simplex = vec![
            vec![rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(1), rat_i(0), rat_i(0)],
            vec![rat_i(0), rat_i(1), rat_i(0)],
            vec![rat_i(0), rat_i(0), rat_i(1)],
        ];
        assert_eq!(polytope_volume(&simplex), rat(1, 6));
        // Octahedron with an interior point thrown in.
        let mut oct: Vec<Vec<Rat>> = Vec::new();
        for s in [1i64, -1] {
            oct.push(vec![rat_i(s), rat_i(0), rat_i(0)]);
            oct.push(vec![rat_i(0), rat_i(s), rat_i(0)]);
            oct.push(vec![rat_i(0), rat_i(0), rat_i(s)]);
        }
        oct.push(vec![rat(1, 4), rat(1, 4), rat(1, 4)]);
        assert_eq!(polytope_volume(&oct), rat(4, 3));
    }

    #[test]
    fn point_in_zero_dim() {
        assert_eq!(polytope_volume(&[vec![]]), rat_i(1));
    }
}
