//! Truncated Laurent series over a residue field: the local fields
//! F_q[t]/(pi)((z)). Precision is tracked exactly and any access past the
//! known window is a hard error (never a silent truncation).

use super::poly::{Re, ResidueField};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Coefficients known for degrees < trunc; absent entries below trunc are
/// exactly zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSeries {
    coeffs: BTreeMap<i64, Re>,
    trunc: i64,
}

impl LSeries {
    pub fn zero(trunc: i64) -> LSeries {
        LSeries {
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    pub fn constant(rf: &ResidueField, c: Re, trunc: i64) -> LSeries {
        let mut s = LSeries::zero(trunc);
        if !rf.is_zero(&c) && trunc > 0 {
            s.coeffs.insert(0, c);
        }
        s
    }

    pub fn monomial(rf: &ResidueField, c: Re, deg: i64, trunc: i64) -> LSeries {
        let mut s = LSeries::zero(trunc);
        if !rf.is_zero(&c) && deg < trunc {
            s.coeffs.insert(deg, c);
        }
        s
    }

    /// Series with the given little-endian coefficients starting at degree 0.
    pub fn from_coeffs(rf: &ResidueField, coeffs: Vec<Re>, trunc: i64) -> LSeries {
        let mut s = LSeries::zero(trunc);
        for (i, c) in coeffs.into_iter().enumerate() {
            if !rf.is_zero(&c) && (i as i64) < trunc {
                s.coeffs.insert(i as i64, c);
            }
        }
        s
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    fn val_lower(&self) -> i64 {
        self.valuation().unwrap_or(self.trunc)
    }

    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, deg: i64) -> Result<Re> {
        if deg >= self.trunc {
            return Err(Error::PrecisionLoss {
                needed: deg,
                trunc: self.trunc,
            });
        }
        Ok(self.coeffs.get(&deg).cloned().unwrap_or_default())
    }

    pub fn with_trunc(&self, trunc: i64) -> LSeries {
        let t = trunc.min(self.trunc);
        LSeries {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(d, _)| **d < t)
                .map(|(d, c)| (*d, c.clone()))
                .collect(),
            trunc: t,
        }
    }

    /// Extends the truncation window, declaring the unknown coefficients
    /// zero. Only valid inside iterative refinement (Newton lifting), where
    /// the next correction step repairs the padded range.
    pub fn with_trunc_padded(&self, trunc: i64) -> LSeries {
        LSeries {
            coeffs: self.coeffs.clone(),
            trunc: trunc.max(self.trunc),
        }
    }

    pub fn shift(&self, k: i64) -> LSeries {
        LSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d + k, c.clone()))
                .collect(),
            trunc: self.trunc + k,
        }
    }

    pub fn add(&self, rf: &ResidueField, other: &LSeries) -> LSeries {
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs: BTreeMap<i64, Re> = BTreeMap::new();
        for (d, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *d < trunc {
                let e = coeffs.entry(*d).or_insert_with(|| rf.zero());
                *e = rf.add(e, c);
            }
        }
        coeffs.retain(|_, c| !rf.is_zero(c));
        LSeries { coeffs, trunc }
    }

    pub fn neg(&self, rf: &ResidueField) -> LSeries {
        LSeries {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, rf.neg(c))).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, rf: &ResidueField, other: &LSeries) -> LSeries {
        self.add(rf, &other.neg(rf))
    }

    pub fn scale(&self, rf: &ResidueField, c: &Re) -> LSeries {
        if rf.is_zero(c) {
            return LSeries::zero(self.trunc);
        }
        LSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, x)| (*d, rf.mul(c, x)))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn mul(&self, rf: &ResidueField, other: &LSeries) -> LSeries {
        let trunc = (self.trunc + other.val_lower()).min(other.trunc + self.val_lower());
        let mut coeffs: BTreeMap<i64, Re> = BTreeMap::new();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &other.coeffs {
                let d = d1 + d2;
                if d < trunc {
                    let e = coeffs.entry(d).or_insert_with(|| rf.zero());
                    *e = rf.add(e, &rf.mul(c1, c2));
                }
            }
        }
        coeffs.retain(|_, c| !rf.is_zero(c));
        LSeries { coeffs, trunc }
    }

    pub fn inverse(&self, rf: &ResidueField) -> Result<LSeries> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        let prec = self.trunc - v;
        let u: Vec<Re> = (0..prec)
            .map(|k| self.coeffs.get(&(v + k)).cloned().unwrap_or_default())
            .collect();
        let u0_inv = rf.inv(&u[0])?;
        let mut h: Vec<Re> = Vec::with_capacity(prec as usize);
        for k in 0..prec as usize {
            if k == 0 {
                h.push(u0_inv.clone());
            } else {
                let mut s = rf.zero();
                for i in 1..=k {
                    s = rf.add(&s, &rf.mul(&u[i], &h[k - i]));
                }
                h.push(rf.neg(&rf.mul(&u0_inv, &s)));
            }
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in h.into_iter().enumerate() {
            if !rf.is_zero(&c) {
                coeffs.insert(-v + k as i64, c);
            }
        }
        Ok(LSeries {
            coeffs,
            trunc: self.trunc - 2 * v,
        })
    }

    pub fn display(&self, rf: &ResidueField) -> String {
        if self.coeffs.is_empty() {
            return format!("O(z^{})", self.trunc);
        }
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| format!("({})z^{}", rf.display(c), d))
            .collect();
        parts.push(format!("O(z^{})", self.trunc));
        parts.join(" + ")
    }
}
