//! Truncated Laurent series in one variable over exact rationals. Every
//! series carries a truncation order: coefficients of degree >= `trunc` are
//! unknown, coefficients below it are known exactly (absent means zero).
//! All arithmetic tracks truncation soundly and requesting an unknown
//! coefficient is a hard error.

use crate::ratmat::{rat_i, Rat};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesQ {
    coeffs: BTreeMap<i64, Rat>,
    trunc: i64,
}

impl SeriesQ {
    pub fn zero(trunc: i64) -> SeriesQ {
        SeriesQ {
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    pub fn constant(c: Rat, trunc: i64) -> SeriesQ {
        let mut s = SeriesQ::zero(trunc);
        if !c.is_zero() && trunc > 0 {
            s.coeffs.insert(0, c);
        }
        s
    }

    pub fn monomial(c: Rat, deg: i64, trunc: i64) -> SeriesQ {
        let mut s = SeriesQ::zero(trunc);
        if !c.is_zero() && deg < trunc {
            s.coeffs.insert(deg, c);
        }
        s
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lowest degree with a known nonzero coefficient; `None` when all known
    /// coefficients vanish (the series is O(t^trunc)).
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lower bound for the valuation, usable in truncation bookkeeping.
    fn val_lower(&self) -> i64 {
        self.valuation().unwrap_or(self.trunc)
    }

    pub fn coeff(&self, deg: i64) -> Result<Rat> {
        if deg >= self.trunc {
            return Err(Error::PrecisionLoss {
                needed: deg,
                trunc: self.trunc,
            });
        }
        Ok(self.coeffs.get(&deg).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate_to(&self, trunc: i64) -> SeriesQ {
        let t = trunc.min(self.trunc);
        SeriesQ {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(d, _)| **d < t)
                .map(|(d, c)| (*d, c.clone()))
                .collect(),
            trunc: t,
        }
    }

    pub fn add(&self, other: &SeriesQ) -> SeriesQ {
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs = BTreeMap::new();
        for (d, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *d < trunc {
                let e = coeffs.entry(*d).or_insert_with(Rat::zero);
                *e = &*e + c;
            }
        }
        coeffs.retain(|_, c: &mut Rat| !c.is_zero());
        SeriesQ { coeffs, trunc }
    }

    pub fn neg(&self) -> SeriesQ {
        SeriesQ {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c.clone())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &SeriesQ) -> SeriesQ {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> SeriesQ {
        if c.is_zero() {
            return SeriesQ::zero(self.trunc);
        }
        SeriesQ {
            coeffs: self.coeffs.iter().map(|(d, x)| (*d, c * x)).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiply by t^k (exact, shifts the truncation window too).
    pub fn shift(&self, k: i64) -> SeriesQ {
        SeriesQ {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d + k, c.clone()))
                .collect(),
            trunc: self.trunc + k,
        }
    }

    pub fn mul(&self, other: &SeriesQ) -> SeriesQ {
        let trunc = (self.trunc + other.val_lower()).min(other.trunc + self.val_lower());
        let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &other.coeffs {
                let d = d1 + d2;
                if d < trunc {
                    let e = coeffs.entry(d).or_insert_with(Rat::zero);
                    *e = &*e + &(c1 * c2);
                }
            }
        }
        coeffs.retain(|_, c: &mut Rat| !c.is_zero());
        SeriesQ { coeffs, trunc }
    }

    /// Multiplicative inverse; requires a known nonzero leading coefficient.
    pub fn inverse(&self) -> Result<SeriesQ> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        // Normalize to a unit u with u(0) != 0, known below trunc - v.
        let prec = self.trunc - v;
        let u: Vec<Rat> = (0..prec)
            .map(|k| self.coeffs.get(&(v + k)).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let u0_inv = u[0].clone().recip();
        let mut h: Vec<Rat> = Vec::with_capacity(prec as usize);
        for k in 0..prec as usize {
            if k == 0 {
                h.push(u0_inv.clone());
            } else {
                let mut s = Rat::zero();
                for i in 1..=k {
                    s += &u[i] * &h[k - i];
                }
                h.push(-&u0_inv * s);
            }
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in h.into_iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(-v + k as i64, c);
            }
        }
        Ok(SeriesQ {
            coeffs,
            trunc: self.trunc - 2 * v,
        })
    }

    /// exp of a series with strictly positive valuation.
    pub fn exp(&self) -> Result<SeriesQ> {
        if self.val_lower() < 1 {
            return Err(Error::NotInvertible);
        }
        let trunc = self.trunc;
        let mut acc = SeriesQ::constant(Rat::one(), trunc);
        let mut powk = SeriesQ::constant(Rat::one(), trunc);
        let mut kfact = Rat::one();
        for k in 1..=trunc.max(0) {
            powk = powk.mul(self).truncate_to(trunc);
            if powk.is_known_zero() {
                break;
            }
            kfact *= rat_i(k);
            acc = acc.add(&powk.scale(&kfact.clone().recip()));
        }
        Ok(acc)
    }
}

/// exp(c t): the exponential of a monomial, the common case.
pub fn exp_linear(c: &Rat, trunc: i64) -> SeriesQ {
    let mut coeffs = BTreeMap::new();
    let mut term = Rat::one();
    for k in 0..trunc.max(0) {
        if !term.is_zero() {
            coeffs.insert(k, term.clone());
        }
        term = &term * c / rat_i(k + 1);
    }
    coeffs.retain(|_, c: &mut Rat| !c.is_zero());
    SeriesQ { coeffs, trunc }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat;

    #[test]
    fn mul_and_trunc() {
        let a = SeriesQ::monomial(rat_i(1), 1, 5); // t + O(t^5)
        let b = a.add(&SeriesQ::constant(rat_i(1), 5)); // 1 + t
        let p = a.mul(&b); // t + t^2, known to t^{5+1} capped
        assert_eq!(p.coeff(1).unwrap(), rat_i(1));
        assert_eq!(p.coeff(2).unwrap(), rat_i(1));
        assert_eq!(p.coeff(3).unwrap(), rat_i(0));
        assert!(p.trunc() >= 5);
    }

    #[test]
    fn exp_series() {
        let e = exp_linear(&rat_i(1), 5);
        assert_eq!(e.coeff(0).unwrap(), rat_i(1));
        assert_eq!(e.coeff(2).unwrap(), rat(1, 2));
        assert_eq!(e.coeff(3).unwrap(), rat(1, 6));
        // exp(t) - 1 has valuation 1.
        let em1 = e.sub(&SeriesQ::constant(rat_i(1), 5));
        assert_eq!(em1.valuation(), Some(1));
        // Method form agrees with the monomial exponential.
        let t = SeriesQ::monomial(rat_i(1), 1, 5);
        assert_eq!(t.exp().unwrap(), e);
        // exp of a quadratic: exp(t^2) = 1 + t^2 + t^4/2 + ...
        let t2 = SeriesQ::monomial(rat_i(1), 2, 6);
        let e2 = t2.exp().unwrap();
        assert_eq!(e2.coeff(2).unwrap(), rat_i(1));
        assert_eq!(e2.coeff(4).unwrap(), rat(1, 2));
        assert_eq!(e2.coeff(3).unwrap(), rat_i(0));
    }

    #[test]
    fn inverse_series() {
        // 1/(e^t - 1) = t^{-1} - 1/2 + t/12 - ...
        let em1 = exp_linear(&rat_i(1), 6).sub(&SeriesQ::constant(rat_i(1), 6));
        let inv = em1.inverse().unwrap();
        assert_eq!(inv.coeff(-1).unwrap(), rat_i(1));
        assert_eq!(inv.coeff(0).unwrap(), rat(-1, 2));
        assert_eq!(inv.coeff(1).unwrap(), rat(1, 12));
        let prod = inv.mul(&em1);
        assert_eq!(prod.coeff(0).unwrap(), rat_i(1));
        assert_eq!(prod.coeff(1).unwrap(), rat_i(0));
    }

    #[test]
    fn precision_is_hard_error() {
        let a = SeriesQ::monomial(rat_i(1), 0, 3);
        assert!(a.coeff(3).is_err());
        assert!(a.coeff(2).is_ok());
    }
}
