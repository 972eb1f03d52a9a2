//! Small exact linear algebra over the rationals and the integers: vector
//! helpers, Gaussian elimination, Hermite and Smith normal forms.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> crate::Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| crate::Error::Parse(format!("bad rational {s:?}: {e}")))
}

pub fn vzero(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn vadd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vneg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn vscale(c: &Rat, a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| c * x).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Solves `sum_j x_j basis[j] = v`. Returns `None` when `v` is not in the span
/// or the basis is dependent in a way that leaves the system inconsistent.
/// The basis vectors need not be a full basis of the ambient space.
pub fn express_in_basis(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let k = basis.len();
    if k == 0 {
        return if is_zero_vec(v) { Some(vec![]) } else { None };
    }
    let n = v.len();
    // Augmented n x (k+1) system, one row per coordinate.
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; k];
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == n {
            break;
        }
    }
    // Inconsistent if a zero row has nonzero rhs.
    for row in m.iter().skip(r) {
        if !row[k].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); k];
    for c in 0..k {
        if let Some(p) = pivot_of_col[c] {
            x[c] = m[p][k].clone();
        }
        // Free columns keep coefficient zero; consistency already checked.
    }
    // With free columns the zero-coefficient choice may not solve the system
    // if the dependent column carried part of v; verify.
    let mut check = vzero(v.len());
    for (c, b) in basis.iter().enumerate() {
        check = vadd(&check, &vscale(&x[c], b));
    }
    if check == v.to_vec() {
        Some(x)
    } else {
        None
    }
}

pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let sub = &f * &a[c][j];
                    a[i][j] = &a[i][j] - sub;
                }
            }
        }
    }
    d
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        let pivot_row: Vec<Rat> = a[r].iter().map(|x| x * &inv).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for j in 0..n {
                    let sub = &f * &pivot_row[j];
                    row[j] = &row[j] - sub;
                }
            }
        }
        a[r] = pivot_row;
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Row Hermite form of an integer matrix; returns the nonzero rows, which are
/// a Z-basis of the row lattice.
pub fn hnf_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    let mut r = 0;
    for c in 0..ncols {
        // Euclidean reduction within column c on rows r..
        loop {
            let mut idx: Vec<usize> = (r..nrows).filter(|&i| !a[i][c].is_zero()).collect();
            if idx.is_empty() {
                break;
            }
            idx.sort_by_key(|&i| a[i][c].abs());
            let p = idx[0];
            a.swap(r, p);
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let mut done = true;
            for i in r + 1..nrows {
                if !a[i][c].is_zero() {
                    let q = div_floor_bi(&a[i][c], &a[r][c]);
                    for j in 0..ncols {
                        let sub = &q * &a[r][j];
                        a[i][j] = &a[i][j] - sub;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < nrows && !a[r][c].is_zero() {
            // Reduce rows above.
            for i in 0..r {
                let q = div_floor_bi(&a[i][c], &a[r][c]);
                if !q.is_zero() {
                    for j in 0..ncols {
                        let sub = &q * &a[r][j];
                        a[i][j] = &a[i][j] - sub;
                    }
                }
            }
            r += 1;
            if r == nrows {
                break;
            }
        }
    }
    a.truncate(r);
    a
}

fn div_floor_bi(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = (a / b, a % b);
    if r.is_zero() || (r.is_negative() == b.is_negative()) {
        q
    } else {
        q - 1
    }
}

/// Smith normal form. Returns `(diag, v)` with `u * a * v = diag` for some
/// unimodular `u`; only `v` (right transform) and the diagonal are needed by
/// callers. `a` must be square.
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut v: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
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
    for t in 0..n {
        loop {
            // Find the smallest nonzero entry in the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            m.swap(t, bi);
            if bj != t {
                for row in m.iter_mut() {
                    row.swap(t, bj);
                }
                for row in v.iter_mut() {
                    row.swap(t, bj);
                }
            }
            if m[t][t].is_negative() {
                for row in m.iter_mut() {
                    row[t] = -&row[t];
                }
                for row in v.iter_mut() {
                    row[t] = -&row[t];
                }
            }
            let mut clean = true;
            for i in t + 1..n {
                if !m[i][t].is_zero() {
                    let q = div_floor_bi(&m[i][t], &m[t][t]);
                    for j in t..n {
                        let sub = &q * &m[t][j];
                        m[i][j] = &m[i][j] - sub;
                    }
                    if !m[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !m[t][j].is_zero() {
                    let q = div_floor_bi(&m[t][j], &m[t][t]);
                    for row in m.iter_mut() {
                        let sub = &q * &row[t];
                        row[j] = &row[j] - sub;
                    }
                    for row in v.iter_mut() {
                        let sub = &q * &row[t];
                        row[j] = &row[j] - sub;
                    }
                    if !m[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
    }
    let diag: Vec<BigInt> = (0..n).map(|i| m[i][i].clone()).collect();
    (diag, v)
}

/// Common denominator of a set of rational vectors.
pub fn common_denominator(rows: &[Vec<Rat>]) -> BigInt {
    let mut d = BigInt::one();
    for row in rows {
        for x in row {
            d = num::integer::lcm(d, x.denom().clone());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn express_simple() {
        let b = vec![vec![rat_i(1), rat_i(0)], vec![rat_i(1), rat_i(1)]];
        let x = express_in_basis(&b, &[rat_i(3), rat_i(2)]).unwrap();
        assert_eq!(x, vec![rat_i(1), rat_i(2)]);
        assert!(express_in_basis(&b[..1], &[rat_i(0), rat_i(1)]).is_none());
    }

    #[test]
    fn det_and_rank() {
        let m = vec![vec![rat_i(2), rat_i(1)], vec![rat_i(1), rat_i(1)]];
        assert_eq!(det(&m), rat_i(1));
        assert_eq!(rank(&m), 2);
        assert_eq!(
            rank(&[vec![rat_i(1), rat_i(2)], vec![rat_i(2), rat_i(4)]]),
            1
        );
    }

    #[test]
    fn hnf_extracts_basis() {
        let rows = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(3)],
        ];
        let h = hnf_rows(&rows);
        assert_eq!(h.len(), 2);
        assert_eq!(h[0], vec![BigInt::from(2), BigInt::from(0)]);
        assert_eq!(h[1], vec![BigInt::from(0), BigInt::from(3)]);
    }

    #[test]
    fn snf_diag() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(6), BigInt::from(8)],
        ];
        let (d, _v) = smith_normal_form(&a);
        assert_eq!(d[0], BigInt::from(2));
        assert_eq!(d[1], BigInt::from(4)); // det 8 = 2*4
    }
}
