use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::TriDegree;
use crate::error::{Error, Result};

/// Poincare polynomial with nonnegative integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poincare {
    terms: BTreeMap<TriDegree, BigUint>,
}

impl Poincare {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(TriDegree::ZERO)
    }

    pub fn monomial(d: TriDegree) -> Self {
        Self::monomial_with(d, 1u32)
    }

    pub fn monomial_with(d: TriDegree, m: impl Into<BigUint>) -> Self {
        let mut p = Self::new();
        p.add_term(d, m.into());
        p
    }

    pub fn from_terms<I, M>(it: I) -> Self
    where
        I: IntoIterator<Item = (TriDegree, M)>,
        M: Into<BigUint>,
    {
        let mut p = Self::new();
        for (d, m) in it {
            p.add_term(d, m.into());
        }
        p
    }

    pub fn add_term(&mut self, d: TriDegree, m: BigUint) {
        if m.is_zero() {
            return;
        }
        *self.terms.entry(d).or_default() += m;
    }

    /// Removes `m` copies of degree `d`; returns false (and leaves `self`
    /// unchanged) if fewer are present.
    pub fn remove_term(&mut self, d: TriDegree, m: &BigUint) -> bool {
        if m.is_zero() {
            return true;
        }
        match self.terms.get_mut(&d) {
            Some(c) if &*c >= m => {
                *c -= m;
                if c.is_zero() {
                    self.terms.remove(&d);
                }
                true
            }
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct degrees.
    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn total_dim(&self) -> BigUint {
        self.terms.values().sum()
    }

    /// `total_dim` for instances known to be small.
    pub fn dim(&self) -> u64 {
        self.total_dim().to_u64().unwrap_or(u64::MAX)
    }

    pub fn get(&self, d: &TriDegree) -> BigUint {
        self.terms.get(d).cloned().unwrap_or_default()
    }

    pub fn contains_degree(&self, d: &TriDegree) -> bool {
        self.terms.contains_key(d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TriDegree, &BigUint)> {
        self.terms.iter()
    }

    /// Largest term in degree order.
    pub fn last_term(&self) -> Option<(TriDegree, BigUint)> {
        self.terms.iter().next_back().map(|(d, m)| (*d, m.clone()))
    }

    pub fn degrees(&self) -> impl Iterator<Item = &TriDegree> {
        self.terms.keys()
    }

    pub fn shift(&self, s: TriDegree) -> Poincare {
        Poincare { terms: self.terms.iter().map(|(d, m)| (*d + s, m.clone())).collect() }
    }

    pub fn scale(&self, k: &BigUint) -> Poincare {
        Poincare::from_terms(self.terms.iter().map(|(d, m)| (*d, m * k)))
    }

    /// The mirror rule: every degree negated.
    pub fn psi_dual(&self) -> Poincare {
        Poincare { terms: self.terms.iter().map(|(d, m)| (-*d, m.clone())).collect() }
    }

    pub fn is_psi_symmetric(&self) -> bool {
        *self == self.psi_dual()
    }

    /// Termwise difference, `None` if some coefficient would go negative.
    pub fn checked_sub(&self, o: &Poincare) -> Option<Poincare> {
        let mut out = self.clone();
        for (d, m) in &o.terms {
            if !out.remove_term(*d, m) {
                return None;
            }
        }
        Some(out)
    }

    /// Termwise `self <= o`.
    pub fn is_sub_of(&self, o: &Poincare) -> bool {
        self.terms.iter().all(|(d, m)| o.terms.get(d).is_some_and(|n| n >= m))
    }

    /// Keeps only the terms whose degree satisfies `f`.
    pub fn filter(&self, f: impl Fn(&TriDegree) -> bool) -> Poincare {
        Poincare { terms: self.terms.iter().filter(|(d, _)| f(d)).map(|(d, m)| (*d, m.clone())).collect() }
    }

    /// Terms at one doubled t-degree.
    pub fn at_t2(&self, t2: i64) -> Poincare {
        self.filter(|d| d.t2 == t2)
    }

    /// `a -> q^n`. The result keeps `a = 0`.
    pub fn sl_specialize(&self, n: i64) -> Poincare {
        Poincare::from_terms(self.terms.iter().map(|(d, m)| (d.sl(n), m.clone())))
    }

    /// `t -> -1`; fails on half-integer t-degrees.
    pub fn euler_specialize(&self) -> Result<SignedPoly> {
        let mut out = SignedPoly::new();
        for (d, m) in &self.terms {
            if !d.has_integral_t() {
                return Err(Error::HalfIntegerT(*d));
            }
            let sign = if (d.t2 / 2) % 2 == 0 { Sign::Plus } else { Sign::Minus };
            out.add_term(TriDegree::new(d.a, d.q, 0), BigInt::from_biguint(sign, m.clone()));
        }
        Ok(out)
    }

    pub fn to_signed(&self) -> SignedPoly {
        SignedPoly::from_terms(self.terms.iter().map(|(d, m)| (*d, BigInt::from(m.clone()))))
    }

    pub fn min_t2(&self) -> Option<i64> {
        self.terms.keys().map(|d| d.t2).min()
    }

    pub fn max_t2(&self) -> Option<i64> {
        self.terms.keys().map(|d| d.t2).max()
    }
}

impl Add for &Poincare {
    type Output = Poincare;
    fn add(self, o: &Poincare) -> Poincare {
        let mut out = self.clone();
        for (d, m) in &o.terms {
            out.add_term(*d, m.clone());
        }
        out
    }
}

impl Add for Poincare {
    type Output = Poincare;
    fn add(self, o: Poincare) -> Poincare {
        &self + &o
    }
}

impl Mul for &Poincare {
    type Output = Poincare;
    fn mul(self, o: &Poincare) -> Poincare {
        let mut out = Poincare::new();
        for (d, m) in &self.terms {
            for (e, n) in &o.terms {
                out.add_term(*d + *e, m * n);
            }
        }
        out
    }
}

impl Mul for Poincare {
    type Output = Poincare;
    fn mul(self, o: Poincare) -> Poincare {
        &self * &o
    }
}

impl std::iter::Sum for Poincare {
    fn sum<I: Iterator<Item = Poincare>>(it: I) -> Poincare {
        it.fold(Poincare::new(), |acc, p| acc + p)
    }
}

impl fmt::Display for Poincare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write_term(f, m, None, d)?;
        }
        Ok(())
    }
}

impl FromStr for Poincare {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::grammar::parse_poincare(s)
    }
}

/// Writes `mult [bracket] monomial` with the canonical spacing rules.
pub(crate) fn write_term(f: &mut fmt::Formatter<'_>, m: &BigUint, bracket: Option<&str>, d: &TriDegree) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    if !m.is_one() {
        parts.push(m.to_string());
    }
    if let Some(b) = bracket {
        parts.push(b.to_string());
    }
    if !d.is_zero() || parts.is_empty() {
        parts.push(d.to_string());
    }
    f.write_str(&parts.join(" "))
}

/// Laurent polynomial with signed integer coefficients, used for Euler
/// characteristics and for signed bracket evaluation.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct SignedPoly {
    terms: BTreeMap<TriDegree, BigInt>,
}

impl SignedPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(d: TriDegree, c: impl Into<BigInt>) -> Self {
        let mut p = Self::new();
        p.add_term(d, c.into());
        p
    }

    pub fn from_terms<I, M>(it: I) -> Self
    where
        I: IntoIterator<Item = (TriDegree, M)>,
        M: Into<BigInt>,
    {
        let mut p = Self::new();
        for (d, c) in it {
            p.add_term(d, c.into());
        }
        p
    }

    pub fn add_term(&mut self, d: TriDegree, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(d).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, d: &TriDegree) -> BigInt {
        self.terms.get(d).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TriDegree, &BigInt)> {
        self.terms.iter()
    }

    pub fn neg(&self) -> SignedPoly {
        SignedPoly { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect() }
    }

    pub fn sub(&self, o: &SignedPoly) -> SignedPoly {
        self + &o.neg()
    }

    pub fn shift(&self, s: TriDegree) -> SignedPoly {
        SignedPoly { terms: self.terms.iter().map(|(d, c)| (*d + s, c.clone())).collect() }
    }

    pub fn psi_dual(&self) -> SignedPoly {
        SignedPoly { terms: self.terms.iter().map(|(d, c)| (-*d, c.clone())).collect() }
    }

    pub fn sl_specialize(&self, n: i64) -> SignedPoly {
        SignedPoly::from_terms(self.terms.iter().map(|(d, c)| (d.sl(n), c.clone())))
    }

    /// Succeeds when every coefficient is nonnegative.
    pub fn to_poincare(&self) -> Result<Poincare> {
        let mut out = Poincare::new();
        for (d, c) in &self.terms {
            match c.to_biguint() {
                Some(m) => out.add_term(*d, m),
                None => return Err(Error::Negative(*d)),
            }
        }
        Ok(out)
    }

    /// Splits into (positive part, negative part).
    pub fn split(&self) -> (Poincare, Poincare) {
        let mut pos = Poincare::new();
        let mut neg = Poincare::new();
        for (d, c) in &self.terms {
            let m = c.magnitude().clone();
            if c.is_positive() {
                pos.add_term(*d, m);
            } else {
                neg.add_term(*d, m);
            }
        }
        (pos, neg)
    }
}

impl Add for &SignedPoly {
    type Output = SignedPoly;
    fn add(self, o: &SignedPoly) -> SignedPoly {
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(*d, c.clone());
        }
        out
    }
}

impl Mul for &SignedPoly {
    type Output = SignedPoly;
    fn mul(self, o: &SignedPoly) -> SignedPoly {
        let mut out = SignedPoly::new();
        for (d, c) in &self.terms {
            for (e, k) in &o.terms {
                out.add_term(*d + *e, c * k);
            }
        }
        out
    }
}

impl fmt::Display for SignedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_term(f, c.magnitude(), None, d)?;
        }
        Ok(())
    }
}

impl FromStr for SignedPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::grammar::parse_signed(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poincare {
        s.parse().unwrap()
    }

    #[test]
    fn add_and_dim() {
        let t = p("a^2 q^-2 + a^2 q^2 t^-2 + a^4 t^-3");
        assert_eq!(&Poincare::new() + &t, t);
        let d = &t + &t;
        assert_eq!(d.dim(), 6);
        assert_eq!(d.get(&TriDegree::at(4, 0, -3)), BigUint::from(2u32));
    }

    #[test]
    fn psi_of_trefoil() {
        let t = p("a^2 q^-2 + a^2 q^2 t^-2 + a^4 t^-3");
        assert_eq!(t.psi_dual(), p("a^-2 q^2 + a^-2 q^-2 t^2 + a^-4 t^3"));
        assert_eq!(Poincare::one().psi_dual(), Poincare::one());
    }

    #[test]
    fn euler_of_trefoil() {
        let t = p("a^2 q^-2 + a^2 q^2 t^-2 + a^4 t^-3");
        let e = t.euler_specialize().unwrap();
        assert_eq!(e, "a^2 q^-2 + a^2 q^2 - a^4".parse().unwrap());
        assert_eq!(Poincare::one().euler_specialize().unwrap().to_string(), "1");
        assert!(matches!(p("t^1/2").euler_specialize(), Err(Error::HalfIntegerT(_))));
    }

    #[test]
    fn sl_merges() {
        assert_eq!(p("a^2 q^-2").sl_specialize(2), p("q^2"));
        assert_eq!(p("a q^-1 + q").sl_specialize(2), p("2 q"));
    }

    #[test]
    fn checked_sub_detects_negative() {
        assert!(p("a").checked_sub(&p("q")).is_none());
        assert_eq!(p("2 a + q").checked_sub(&p("a")).unwrap(), p("a + q"));
    }
}
