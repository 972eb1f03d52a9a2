//! Polynomials in t over F_q, rational functions, monic irreducible
//! enumeration, residue fields F_q[t]/(pi) and exact local expansions at a
//! finite place (by Hensel lifting of t) or at infinity (z = 1/t).

use super::ff::{Fe, FiniteField};
use super::fps::LSeries;
use crate::{Error, Result};

/// Polynomial over F_q, little-endian coefficients, no trailing zeros
/// (the zero polynomial is an empty vector).
pub type Poly = Vec<Fe>;

pub fn normalize(ff: &FiniteField, mut a: Poly) -> Poly {
    while let Some(last) = a.last() {
        if ff.is_zero(last) {
            a.pop();
        } else {
            break;
        }
    }
    a
}

pub fn degree(a: &Poly) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn add(ff: &FiniteField, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| ff.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| ff.zero());
        out.push(ff.add(&x, &y));
    }
    normalize(ff, out)
}

pub fn neg(ff: &FiniteField, a: &Poly) -> Poly {
    a.iter().map(|c| ff.neg(c)).collect()
}

pub fn sub(ff: &FiniteField, a: &Poly, b: &Poly) -> Poly {
    add(ff, a, &neg(ff, b))
}

pub fn mul(ff: &FiniteField, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ff.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ff.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ff.add(&out[i + j], &ff.mul(x, y));
        }
    }
    normalize(ff, out)
}

pub fn scale(ff: &FiniteField, c: &Fe, a: &Poly) -> Poly {
    normalize(ff, a.iter().map(|x| ff.mul(c, x)).collect())
}

/// Division with remainder; divisor must be nonzero.
pub fn divrem(ff: &FiniteField, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    if b.is_empty() {
        return Err(Error::Parse("polynomial division by zero".into()));
    }
    let db = b.len() - 1;
    let lead_inv = ff.inv(b.last().unwrap())?;
    let mut r = a.clone();
    let mut q: Poly = vec![ff.zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = ff.mul(r.last().unwrap(), &lead_inv);
        if !ff.is_zero(&c) {
            q[dr - db] = c.clone();
            for j in 0..=db {
                let s = ff.mul(&c, &b[j]);
                r[dr - db + j] = ff.sub(&r[dr - db + j], &s);
            }
        }
        r.pop();
        while r.last().map(|x| ff.is_zero(x)).unwrap_or(false) {
            r.pop();
        }
    }
    Ok((normalize(ff, q), normalize(ff, r)))
}

pub fn gcd(ff: &FiniteField, a: &Poly, b: &Poly) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_empty() {
        let (_, r) = divrem(ff, &a, &b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    make_monic(ff, &a)
}

pub fn make_monic(ff: &FiniteField, a: &Poly) -> Poly {
    match a.last() {
        None => vec![],
        Some(lead) => {
            let inv = ff.inv(lead).expect("nonzero leading coefficient");
            scale(ff, &inv, a)
        }
    }
}

pub fn eval(ff: &FiniteField, a: &Poly, x: &Fe) -> Fe {
    let mut acc = ff.zero();
    for c in a.iter().rev() {
        acc = ff.add(&ff.mul(&acc, x), c);
    }
    acc
}

/// Multiplicity of the monic irreducible `pi` in `a` (a nonzero polynomial).
pub fn multiplicity(ff: &FiniteField, a: &Poly, pi: &Poly) -> u32 {
    let mut a = a.clone();
    let mut m = 0;
    loop {
        let (q, r) = divrem(ff, &a, pi).expect("pi nonzero");
        if r.is_empty() {
            m += 1;
            a = q;
        } else {
            return m;
        }
    }
}

/// All monic polynomials of exact degree d.
pub fn monic_of_degree(ff: &FiniteField, d: usize) -> Vec<Poly> {
    let els = ff.elements();
    let mut out: Vec<Poly> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * els.len());
        for pre in &out {
            for c in &els {
                let mut v = pre.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|mut low| {
            low.push(ff.one());
            low
        })
        .collect()
}

pub fn is_irreducible(ff: &FiniteField, a: &Poly) -> bool {
    let Some(d) = degree(a) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    for e in 1..=d / 2 {
        for pi in monic_of_degree(ff, e) {
            let (_, r) = divrem(ff, a, &pi).expect("nonzero");
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Monic irreducible factors (with multiplicity) by trial division; fine at
/// the degrees used here.
pub fn factor(ff: &FiniteField, a: &Poly) -> Vec<(Poly, u32)> {
    let mut rest = make_monic(ff, a);
    let mut out = Vec::new();
    let mut e = 1usize;
    while degree(&rest).unwrap_or(0) > 0 {
        let d = degree(&rest).unwrap();
        if e > d / 2 && degree(&rest).unwrap_or(0) >= 1 {
            out.push((rest.clone(), 1));
            break;
        }
        let mut hit = false;
        for pi in monic_of_degree(ff, e) {
            if !is_irreducible(ff, &pi) {
                continue;
            }
            let m = multiplicity(ff, &rest, &pi);
            if m > 0 {
                out.push((pi.clone(), m));
                for _ in 0..m {
                    rest = divrem(ff, &rest, &pi).unwrap().0;
                }
                hit = true;
            }
        }
        if !hit {
            e += 1;
        } else if degree(&rest).unwrap_or(0) == 0 {
            break;
        }
    }
    out
}

pub fn display(ff: &FiniteField, a: &Poly) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in a.iter().enumerate().rev() {
        if ff.is_zero(c) {
            continue;
        }
        let cs = ff.display(c);
        let body = match i {
            0 => cs,
            1 if cs == "1" => "t".into(),
            1 => format!("{cs}*t"),
            _ if cs == "1" => format!("t^{i}"),
            _ => format!("{cs}*t^{i}"),
        };
        parts.push(body);
    }
    parts.join("+")
}

/// A rational function num/den over F_q, stored reduced with monic
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn new(ff: &FiniteField, num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_empty() {
            return Err(Error::Parse("zero denominator".into()));
        }
        let g = gcd(ff, &num, &den);
        let num = divrem(ff, &num, &g)?.0;
        let den = divrem(ff, &den, &g)?.0;
        // Make the denominator monic.
        let lead = den.last().unwrap().clone();
        let inv = ff.inv(&lead)?;
        Ok(RatFunc {
            num: scale(ff, &inv, &num),
            den: scale(ff, &inv, &den),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Valuation at a finite place given by a monic irreducible.
    pub fn val_at(&self, ff: &FiniteField, pi: &Poly) -> i64 {
        assert!(!self.is_zero(), "valuation of zero");
        multiplicity(ff, &self.num, pi) as i64 - multiplicity(ff, &self.den, pi) as i64
    }

    /// Valuation at infinity: deg(den) - deg(num).
    pub fn val_at_infinity(&self) -> i64 {
        assert!(!self.is_zero(), "valuation of zero");
        degree(&self.den).unwrap() as i64 - degree(&self.num).unwrap() as i64
    }

    /// Value at infinity when the valuation there is 0: ratio of leading
    /// coefficients.
    pub fn value_at_infinity(&self, ff: &FiniteField) -> Result<Fe> {
        if self.is_zero() || self.val_at_infinity() != 0 {
            return Err(Error::InfinityRegularity(
                "function does not have a finite nonzero value at infinity".into(),
            ));
        }
        let ln = self.num.last().unwrap();
        let ld = self.den.last().unwrap();
        Ok(ff.mul(ln, &ff.inv(ld)?))
    }

    pub fn display(&self, ff: &FiniteField) -> String {
        format!("({})/({})", display(ff, &self.num), display(ff, &self.den))
    }
}

/// The residue field F_q[t]/(pi); elements are polynomials of degree <
/// deg(pi) over the base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    pub base: FiniteField,
    pub pi: Poly,
}

/// An element of a residue field.
pub type Re = Poly;

impl ResidueField {
    pub fn new(base: &FiniteField, pi: &Poly) -> Result<ResidueField> {
        if !is_irreducible(base, pi) {
            return Err(Error::NotIrreducible);
        }
        Ok(ResidueField {
            base: base.clone(),
            pi: pi.clone(),
        })
    }

    pub fn degree(&self) -> usize {
        degree(&self.pi).unwrap()
    }

    pub fn size(&self) -> u64 {
        self.base.q().pow(self.degree() as u32)
    }

    pub fn zero(&self) -> Re {
        vec![]
    }

    pub fn one(&self) -> Re {
        vec![self.base.one()]
    }

    pub fn is_zero(&self, a: &Re) -> bool {
        a.is_empty()
    }

    pub fn reduce(&self, a: &Poly) -> Re {
        divrem(&self.base, a, &self.pi).expect("pi nonzero").1
    }

    pub fn embed_base(&self, c: &Fe) -> Re {
        if self.base.is_zero(c) {
            vec![]
        } else {
            vec![c.clone()]
        }
    }

    pub fn from_int_base(&self, n: i64) -> Re {
        self.embed_base(&self.base.from_int(n))
    }

    /// The class of t.
    pub fn t_class(&self) -> Re {
        self.reduce(&vec![self.base.zero(), self.base.one()])
    }

    pub fn add(&self, a: &Re, b: &Re) -> Re {
        add(&self.base, a, b)
    }

    pub fn sub(&self, a: &Re, b: &Re) -> Re {
        sub(&self.base, a, b)
    }

    pub fn neg(&self, a: &Re) -> Re {
        neg(&self.base, a)
    }

    pub fn mul(&self, a: &Re, b: &Re) -> Re {
        self.reduce(&mul(&self.base, a, b))
    }

    pub fn inv(&self, a: &Re) -> Result<Re> {
        if self.is_zero(a) {
            return Err(Error::Parse("division by zero in residue field".into()));
        }
        // Extended Euclid in F_q[t].
        let (mut r0, mut r1) = (self.pi.clone(), a.clone());
        let (mut s0, mut s1): (Poly, Poly) = (vec![], vec![self.base.one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(&self.base, &r0, &r1)?;
            let s = sub(&self.base, &s0, &mul(&self.base, &q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd, a unit constant since pi is irreducible and a != 0.
        let c = r0.last().ok_or(Error::NotIrreducible)?;
        let cinv = self.base.inv(c)?;
        Ok(self.reduce(&scale(&self.base, &cinv, &s0)))
    }

    pub fn elements(&self) -> Vec<Re> {
        let els = self.base.elements();
        let mut out: Vec<Re> = vec![vec![]];
        for _ in 0..self.degree() {
            let mut next = Vec::with_capacity(out.len() * els.len());
            for pre in &out {
                for c in &els {
                    let mut v = pre.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|v| normalize(&self.base, v))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn is_square(&self, a: &Re) -> bool {
        if self.is_zero(a) {
            return true;
        }
        if self.base.characteristic() == 2 {
            return true;
        }
        let e = (self.size() - 1) / 2;
        self.pow(a, e) == self.one()
    }

    pub fn pow(&self, a: &Re, mut e: u64) -> Re {
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

    pub fn display(&self, a: &Re) -> String {
        display(&self.base, a)
    }

    /// The image of t in R[[z]] with pi(t) = z: Hensel lift of the residue
    /// class of t along the simple root of pi.
    pub fn t_expansion(&self, prec: i64) -> LSeries {
        let prec = prec.max(1);
        let mut cur = LSeries::constant(self, self.t_class(), 1);
        // Newton iteration doubles the correct precision each round:
        // t <- t - (pi(t) - z)/pi'(t).
        while cur.trunc() < prec {
            let new_prec = (2 * cur.trunc()).min(prec);
            let t = cur.with_trunc_padded(new_prec);
            let pi_t = self.eval_poly_series(&self.pi, &t);
            let z = LSeries::monomial(self, self.one(), 1, new_prec);
            let num = pi_t.sub(self, &z);
            let dpi = self.derivative(&self.pi);
            let den = self.eval_poly_series(&dpi, &t);
            let corr = num.mul(self, &den.inverse(self).expect("simple root"));
            cur = t.sub(self, &corr.with_trunc(new_prec));
        }
        cur
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        let mut out = Vec::new();
        for (i, c) in a.iter().enumerate().skip(1) {
            let k = self.base.from_int(i as i64);
            out.push(self.base.mul(&k, c));
        }
        normalize(&self.base, out)
    }

    /// Evaluate a polynomial over F_q on a series over the residue field.
    pub fn eval_poly_series(&self, a: &Poly, x: &LSeries) -> LSeries {
        let mut acc = LSeries::zero(x.trunc());
        for c in a.iter().rev() {
            acc = acc.mul(self, x);
            let cc = LSeries::constant(self, self.embed_base(c), x.trunc());
            acc = acc.add(self, &cc);
        }
        acc
    }

    /// Exact expansion of a rational function at this place, to the requested
    /// precision (number of known coefficients past the leading term).
    pub fn expand(&self, f: &RatFunc, prec: i64) -> LSeries {
        assert!(!f.is_zero(), "expansion of zero");
        let vn = multiplicity(&self.base, &f.num, &self.pi) as i64;
        let vd = multiplicity(&self.base, &f.den, &self.pi) as i64;
        // Strip pi-powers so numerator and denominator become units, then
        // expand each and divide.
        let mut num = f.num.clone();
        for _ in 0..vn {
            num = divrem(&self.base, &num, &self.pi).unwrap().0;
        }
        let mut den = f.den.clone();
        for _ in 0..vd {
            den = divrem(&self.base, &den, &self.pi).unwrap().0;
        }
        let work = prec + 2;
        let t = self.t_expansion(work);
        let ns = self.eval_poly_series(&num, &t);
        let ds = self.eval_poly_series(&den, &t);
        let inv = ds.inverse(self).expect("unit denominator");
        ns.mul(self, &inv).shift(vn - vd).with_trunc(prec + vn - vd)
    }
}

/// Expansion of a rational function at infinity (uniformizer z = 1/t);
/// residue field is the base field, presented as the residue field of the
/// degree-one modulus "t" for uniformity of the series type.
pub fn expand_at_infinity(ff: &FiniteField, f: &RatFunc, prec: i64) -> LSeries {
    assert!(!f.is_zero(), "expansion of zero");
    // f(t) = z^{deg den - deg num} * rev(num)(z)/rev(den)(z).
    let rf = ResidueField::new(ff, &vec![ff.zero(), ff.one()]).expect("t is irreducible");
    let rev = |a: &Poly| -> Vec<Re> {
        let mut v: Vec<Re> = a.iter().rev().map(|c| rf.embed_base(c)).collect();
        while v.last().map(|c| rf.is_zero(c)).unwrap_or(false) {
            v.pop();
        }
        v
    };
    let v = f.val_at_infinity();
    let work = prec + v.abs() + 2;
    let ns = LSeries::from_coeffs(&rf, rev(&f.num), work);
    let ds = LSeries::from_coeffs(&rf, rev(&f.den), work);
    let inv = ds.inverse(&rf).expect("reversed denominator is a unit");
    ns.mul(&rf, &inv).shift(v).with_trunc(prec + v)
}

/// Parses polynomials and rational functions in t: integers, t, ^, *, /, +,
/// -, parentheses.
pub fn parse_ratfunc(ff: &FiniteField, s: &str) -> Result<RatFunc> {
    let tokens = tokenize(s)?;
    let mut pos = 0usize;
    let r = parse_expr(ff, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!("trailing input at token {pos}")));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' => {
                it.next();
            }
            '0'..='9' => {
                let mut n = 0i64;
                while let Some(&d) = it.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n * 10 + v as i64;
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(n));
            }
            't' => {
                it.next();
                out.push(Tok::T);
            }
            '+' => {
                it.next();
                out.push(Tok::Plus);
            }
            '-' => {
                it.next();
                out.push(Tok::Minus);
            }
            '*' => {
                it.next();
                out.push(Tok::Star);
            }
            '/' => {
                it.next();
                out.push(Tok::Slash);
            }
            '^' => {
                it.next();
                out.push(Tok::Caret);
            }
            '(' => {
                it.next();
                out.push(Tok::LParen);
            }
            ')' => {
                it.next();
                out.push(Tok::RParen);
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

fn parse_expr(ff: &FiniteField, toks: &[Tok], pos: &mut usize) -> Result<RatFunc> {
    let mut acc = parse_term(ff, toks, pos)?;
    while *pos < toks.len() {
        match toks[*pos] {
            Tok::Plus => {
                *pos += 1;
                let rhs = parse_term(ff, toks, pos)?;
                acc = rf_add(ff, &acc, &rhs)?;
            }
            Tok::Minus => {
                *pos += 1;
                let rhs = parse_term(ff, toks, pos)?;
                acc = rf_sub(ff, &acc, &rhs)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_term(ff: &FiniteField, toks: &[Tok], pos: &mut usize) -> Result<RatFunc> {
    let mut acc = parse_factor(ff, toks, pos)?;
    while *pos < toks.len() {
        match toks[*pos] {
            Tok::Star => {
                *pos += 1;
                let rhs = parse_factor(ff, toks, pos)?;
                acc = rf_mul(ff, &acc, &rhs)?;
            }
            Tok::Slash => {
                *pos += 1;
                let rhs = parse_factor(ff, toks, pos)?;
                acc = rf_div(ff, &acc, &rhs)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_factor(ff: &FiniteField, toks: &[Tok], pos: &mut usize) -> Result<RatFunc> {
    if *pos >= toks.len() {
        return Err(Error::Parse("unexpected end of input".into()));
    }
    let base = match &toks[*pos] {
        Tok::Minus => {
            *pos += 1;
            let f = parse_factor(ff, toks, pos)?;
            return RatFunc::new(ff, neg(ff, &f.num), f.den);
        }
        Tok::Num(n) => {
            *pos += 1;
            RatFunc::new(ff, vec![ff.from_int(*n)], vec![ff.one()])?
        }
        Tok::T => {
            *pos += 1;
            RatFunc::new(ff, vec![ff.zero(), ff.one()], vec![ff.one()])?
        }
        Tok::LParen => {
            *pos += 1;
            let inner = parse_expr(ff, toks, pos)?;
            if *pos >= toks.len() || toks[*pos] != Tok::RParen {
                return Err(Error::Parse("missing closing parenthesis".into()));
            }
            *pos += 1;
            inner
        }
        other => return Err(Error::Parse(format!("unexpected token {other:?}"))),
    };
    if *pos < toks.len() && toks[*pos] == Tok::Caret {
        *pos += 1;
        let Tok::Num(e) = toks[*pos] else {
            return Err(Error::Parse("exponent must be a number".into()));
        };
        *pos += 1;
        let mut acc = RatFunc::new(ff, vec![ff.one()], vec![ff.one()])?;
        for _ in 0..e {
            acc = rf_mul(ff, &acc, &base)?;
        }
        return Ok(acc);
    }
    Ok(base)
}

pub fn rf_add(ff: &FiniteField, a: &RatFunc, b: &RatFunc) -> Result<RatFunc> {
    RatFunc::new(
        ff,
        add(ff, &mul(ff, &a.num, &b.den), &mul(ff, &b.num, &a.den)),
        mul(ff, &a.den, &b.den),
    )
}

pub fn rf_sub(ff: &FiniteField, a: &RatFunc, b: &RatFunc) -> Result<RatFunc> {
    rf_add(ff, a, &RatFunc::new(ff, neg(ff, &b.num), b.den.clone())?)
}

pub fn rf_mul(ff: &FiniteField, a: &RatFunc, b: &RatFunc) -> Result<RatFunc> {
    RatFunc::new(ff, mul(ff, &a.num, &b.num), mul(ff, &a.den, &b.den))
}

pub fn rf_div(ff: &FiniteField, a: &RatFunc, b: &RatFunc) -> Result<RatFunc> {
    if b.is_zero() {
        return Err(Error::Parse("division by zero rational function".into()));
    }
    RatFunc::new(ff, mul(ff, &a.num, &b.den), mul(ff, &a.den, &b.num))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        let ff = FiniteField::new(3).unwrap();
        let f = parse_ratfunc(&ff, "(t+1)/t").unwrap();
        assert_eq!(degree(&f.num), Some(1));
        assert_eq!(degree(&f.den), Some(1));
        // (t^2 - 1)/(t - 1) reduces to t + 1.
        let g = parse_ratfunc(&ff, "(t^2+2)/(t+2)").unwrap(); // t^2 - 1 = t^2 + 2, t - 1 = t + 2 mod 3
        assert_eq!(degree(&g.num), Some(1));
        assert_eq!(degree(&g.den), Some(0));
    }

    #[test]
    fn valuations() {
        let ff = FiniteField::new(3).unwrap();
        let f = parse_ratfunc(&ff, "(t+1)/t").unwrap();
        let t = vec![ff.zero(), ff.one()];
        let t1 = vec![ff.one(), ff.one()];
        assert_eq!(f.val_at(&ff, &t), -1);
        assert_eq!(f.val_at(&ff, &t1), 1);
        assert_eq!(f.val_at_infinity(), 0);
        assert_eq!(f.value_at_infinity(&ff).unwrap(), ff.one());
    }

    #[test]
    fn irreducibility() {
        let ff = FiniteField::new(3).unwrap();
        // t^2 + 1 is irreducible over F_3 (no square root of -1).
        let f = parse_ratfunc(&ff, "t^2+1").unwrap();
        assert!(is_irreducible(&ff, &f.num));
        // t^2 + 2 = (t+1)(t+2) is not.
        let g = parse_ratfunc(&ff, "t^2+2").unwrap();
        assert!(!is_irreducible(&ff, &g.num));
        let factors = factor(&ff, &g.num);
        assert_eq!(factors.len(), 2);
    }

    #[test]
    fn residue_field_inverse() {
        let ff = FiniteField::new(3).unwrap();
        let pi = parse_ratfunc(&ff, "t^2+1").unwrap().num;
        let rf = ResidueField::new(&ff, &pi).unwrap();
        assert_eq!(rf.size(), 9);
        for a in rf.elements() {
            if !rf.is_zero(&a) {
                assert_eq!(rf.mul(&a, &rf.inv(&a).unwrap()), rf.one());
            }
        }
    }

    #[test]
    fn hensel_expansion() {
        let ff = FiniteField::new(3).unwrap();
        // At the place pi = t^2 + 1 the class of t satisfies pi(t) = z.
        let pi = parse_ratfunc(&ff, "t^2+1").unwrap().num;
        let rf = ResidueField::new(&ff, &pi).unwrap();
        let t = rf.t_expansion(5);
        let pit = rf.eval_poly_series(&pi, &t);
        // pi(t(z)) = z exactly within precision.
        for d in 0..5 {
            let c = pit.coeff(d).unwrap();
            if d == 1 {
                assert_eq!(c, rf.one());
            } else {
                assert!(rf.is_zero(&c));
            }
        }
    }

    #[test]
    fn expansion_valuations() {
        let ff = FiniteField::new(3).unwrap();
        let f = parse_ratfunc(&ff, "(t+1)/t").unwrap();
        let t_place = parse_ratfunc(&ff, "t").unwrap().num;
        let rf = ResidueField::new(&ff, &t_place).unwrap();
        let s = rf.expand(&f, 4);
        assert_eq!(s.valuation(), Some(-1));
        // At infinity (t+1)/t = 1 + z + ...
        let si = expand_at_infinity(&ff, &f, 4);
        assert_eq!(si.valuation(), Some(0));
        let rf_inf = ResidueField::new(&ff, &t_place).unwrap();
        assert_eq!(si.coeff(0).unwrap(), rf_inf.one());
        assert_eq!(si.coeff(1).unwrap(), rf_inf.one());
    }
}
