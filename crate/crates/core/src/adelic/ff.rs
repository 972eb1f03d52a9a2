//! Arithmetic in F_q for prime powers q <= 9, as polynomials over F_p
//! modulo a fixed monic irreducible. Elements are coefficient vectors of
//! length k (little endian); for prime q this degenerates to plain residues.

use crate::{Error, Result};

/// An element of F_q, as coefficients over F_p.
pub type Fe = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    k: usize,
    /// Monic modulus of degree k, length k+1, little endian.
    modulus: Vec<u64>,
}

fn factor_prime_power(q: u64) -> Option<(u64, usize)> {
    for p in [2u64, 3, 5, 7] {
        let mut k = 0usize;
        let mut m = q;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if m == 1 && k >= 1 {
            return Some((p, k));
        }
    }
    None
}

impl FiniteField {
    pub fn new(q: u64) -> Result<FiniteField> {
        if q > 9 {
            return Err(Error::Unsupported(format!("q = {q} > 9")));
        }
        let (p, k) = factor_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        FiniteField::new_with_degree(p, k)
    }

    /// Extension field F_{p^k} without the public size bound; used
    /// internally for constant-field quadratic extensions.
    pub fn new_with_degree(p: u64, k: usize) -> Result<FiniteField> {
        if ![2u64, 3, 5, 7].contains(&p) || k == 0 {
            return Err(Error::NotPrimePower(p.pow(k as u32)));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            find_irreducible(p, k)
        };
        Ok(FiniteField { p, k, modulus })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn zero(&self) -> Fe {
        vec![0; self.k]
    }

    pub fn one(&self) -> Fe {
        let mut v = vec![0; self.k];
        v[0] = 1;
        v
    }

    pub fn from_int(&self, n: i64) -> Fe {
        let mut v = vec![0; self.k];
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        (0..self.k).map(|i| (a[i] + b[i]) % self.p).collect()
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        (0..self.k)
            .map(|i| (a[i] + self.p - b[i]) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        (0..self.k).map(|i| (self.p - a[i]) % self.p).collect()
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        // Schoolbook product then reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * self.k];
        for i in 0..self.k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.k {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % self.p;
            }
        }
        for d in (self.k..2 * self.k).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &m) in self.modulus.iter().enumerate().take(self.k) {
                let idx = d - self.k + j;
                prod[idx] = (prod[idx] + c * (self.p - m)) % self.p;
            }
        }
        prod.truncate(self.k);
        prod
    }

    pub fn pow(&self, a: &Fe, mut e: u64) -> Fe {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Fe) -> Result<Fe> {
        if self.is_zero(a) {
            return Err(Error::Parse("division by zero in F_q".into()));
        }
        Ok(self.pow(a, self.q() - 2))
    }

    /// All elements of the field, in a fixed order.
    pub fn elements(&self) -> Vec<Fe> {
        let mut out = vec![self.zero()];
        for _ in 0..self.k {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for e in &out {
                for c in 0..self.p {
                    let mut v = e.clone();
                    v.remove(0);
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_square(&self, a: &Fe) -> bool {
        if self.is_zero(a) {
            return true;
        }
        if self.p == 2 {
            return true; // squaring is a bijection in characteristic 2
        }
        let e = (self.q() - 1) / 2;
        self.pow(a, e) == self.one()
    }

    pub fn display(&self, a: &Fe) -> String {
        if self.k == 1 {
            return a[0].to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                parts.push(match i {
                    0 => c.to_string(),
                    1 if c == 1 => "s".into(),
                    1 => format!("{c}*s"),
                    _ if c == 1 => format!("s^{i}"),
                    _ => format!("{c}*s^{i}"),
                });
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// Lexicographically first monic irreducible of degree k over F_p. Only
/// k <= 3 is ever needed (q <= 9), where having no root is equivalent to
/// irreducibility.
fn find_irreducible(p: u64, k: usize) -> Vec<u64> {
    assert!(
        (2..=3).contains(&k),
        "base extensions of degree 2 or 3 only"
    );
    let mut candidate = vec![0u64; k + 1];
    candidate[k] = 1;
    loop {
        let has_root = (0..p).any(|x| {
            let mut acc = 0u64;
            for &c in candidate.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        });
        if !has_root {
            return candidate;
        }
        for c in candidate.iter_mut().take(k) {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f5 = FiniteField::new(5).unwrap();
        let a = f5.from_int(3);
        let b = f5.from_int(4);
        assert_eq!(f5.mul(&a, &b), f5.from_int(12));
        assert_eq!(f5.mul(&a, &f5.inv(&a).unwrap()), f5.one());
        assert_eq!(f5.elements().len(), 5);
        // Squares mod 5 are {0,1,4}.
        assert!(f5.is_square(&f5.from_int(4)));
        assert!(!f5.is_square(&f5.from_int(2)));
    }

    #[test]
    fn extension_fields() {
        for q in [4u64, 8, 9] {
            let f = FiniteField::new(q).unwrap();
            let els = f.elements();
            assert_eq!(els.len(), q as usize);
            // Every nonzero element is invertible.
            for e in &els {
                if !f.is_zero(e) {
                    assert_eq!(f.mul(e, &f.inv(e).unwrap()), f.one());
                }
            }
            // The multiplicative group has exponent q-1.
            for e in &els {
                if !f.is_zero(e) {
                    assert_eq!(f.pow(e, q - 1), f.one());
                }
            }
        }
        assert!(FiniteField::new(6).is_err());
        assert!(FiniteField::new(16).is_err());
    }
}
