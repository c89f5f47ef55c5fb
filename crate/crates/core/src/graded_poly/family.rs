use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::write_term;
use super::{Poincare, SignedPoly, TriDegree};
use crate::error::{Error, Result};

/// The quantum integer `[N + offset]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct BracketAtom {
    pub offset: i64,
}

impl BracketAtom {
    pub const fn new(offset: i64) -> Self {
        BracketAtom { offset }
    }

    pub fn length(&self, n: i64) -> i64 {
        n + self.offset
    }

    /// q-exponents `m-1, m-3, .., 1-m` of `[m]`, `m = N + offset`.
    pub fn exponents(&self, n: i64) -> Result<Vec<i64>> {
        let m = self.length(n);
        if m < 0 {
            return Err(Error::NegativeBracket { offset: self.offset, n });
        }
        Ok(quantum_exponents(m))
    }

    /// Signed evaluation with `[-m] = -[m]`.
    pub fn signed(&self, n: i64) -> SignedPoly {
        let m = self.length(n);
        let sign = if m < 0 { -1 } else { 1 };
        SignedPoly::from_terms(
            quantum_exponents(m.abs()).into_iter().map(|e| (TriDegree::new(0, e, 0), BigInt::from(sign))),
        )
    }
}

pub fn quantum_exponents(m: i64) -> Vec<i64> {
    (0..m).map(|s| m - 1 - 2 * s).collect()
}

impl fmt::Display for BracketAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            0 => f.write_str("[N]"),
            c => write!(f, "[N{c:+}]"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Key {
    mono: TriDegree,
    atom: Option<BracketAtom>,
}

/// An N-parametric Poincare polynomial. A term `m [N+c]` stands for the
/// q-string `m (q^{N+c-1} + .. + q^{1-N-c})`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct FamilyPoincare {
    terms: BTreeMap<Key, BigUint>,
}

impl From<Poincare> for FamilyPoincare {
    fn from(p: Poincare) -> Self {
        FamilyPoincare::from_poincare(&p)
    }
}

impl FamilyPoincare {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_poincare(p: &Poincare) -> Self {
        let mut f = Self::new();
        for (d, m) in p.iter() {
            f.add_term(*d, None, m.clone());
        }
        f
    }

    pub fn bracket(mono: TriDegree, atom: BracketAtom) -> Self {
        let mut f = Self::new();
        f.add_term(mono, Some(atom), BigUint::from(1u32));
        f
    }

    pub fn add_term(&mut self, mono: TriDegree, atom: Option<BracketAtom>, m: BigUint) {
        if m.is_zero() {
            return;
        }
        *self.terms.entry(Key { mono, atom }).or_default() += m;
    }

    pub fn terms(&self) -> impl Iterator<Item = (TriDegree, Option<BracketAtom>, &BigUint)> {
        self.terms.iter().map(|(k, m)| (k.mono, k.atom, m))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_atom_free(&self) -> bool {
        self.terms.keys().all(|k| k.atom.is_none())
    }

    pub fn atom_free_part(&self) -> Poincare {
        Poincare::from_terms(self.terms.iter().filter(|(k, _)| k.atom.is_none()).map(|(k, m)| (k.mono, m.clone())))
    }

    pub fn bracket_part(&self) -> FamilyPoincare {
        FamilyPoincare {
            terms: self.terms.iter().filter(|(k, _)| k.atom.is_some()).map(|(k, m)| (*k, m.clone())).collect(),
        }
    }

    pub fn to_poincare(&self) -> Result<Poincare> {
        if !self.is_atom_free() {
            return Err(Error::NotAtomFree);
        }
        Ok(self.atom_free_part())
    }

    /// Smallest N at which every bracket has nonnegative length.
    pub fn min_n(&self) -> i64 {
        self.terms.keys().filter_map(|k| k.atom).map(|a| -a.offset).fold(1, i64::max)
    }

    pub fn add(&self, o: &FamilyPoincare) -> FamilyPoincare {
        let mut out = self.clone();
        for (k, m) in &o.terms {
            out.add_term(k.mono, k.atom, m.clone());
        }
        out
    }

    pub fn shift(&self, s: TriDegree) -> FamilyPoincare {
        let mut out = Self::new();
        for (k, m) in &self.terms {
            out.add_term(k.mono + s, k.atom, m.clone());
        }
        out
    }

    /// Brackets are symmetric under `q -> q^-1`, so only centers move.
    pub fn psi_dual(&self) -> FamilyPoincare {
        let mut out = Self::new();
        for (k, m) in &self.terms {
            out.add_term(-k.mono, k.atom, m.clone());
        }
        out
    }

    pub fn mul(&self, o: &FamilyPoincare) -> Result<FamilyPoincare> {
        if !self.is_atom_free() && !o.is_atom_free() {
            return Err(Error::BracketProduct);
        }
        let mut out = Self::new();
        for (k, m) in &self.terms {
            for (l, n) in &o.terms {
                out.add_term(k.mono + l.mono, k.atom.or(l.atom), m * n);
            }
        }
        Ok(out)
    }

    /// Expands every bracket into its q-string at `n`, keeping the a-grading.
    pub fn evaluate(&self, n: i64) -> Result<Poincare> {
        let mut out = Poincare::new();
        for (k, m) in &self.terms {
            match k.atom {
                None => out.add_term(k.mono, m.clone()),
                Some(a) => {
                    for e in a.exponents(n)? {
                        out.add_term(k.mono + TriDegree::new(0, e, 0), m.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Like `evaluate` but with `[-m] = -[m]` for short brackets.
    pub fn evaluate_signed(&self, n: i64) -> SignedPoly {
        let mut out = SignedPoly::new();
        for (k, m) in &self.terms {
            let mono = SignedPoly::monomial(k.mono, BigInt::from(m.clone()));
            match k.atom {
                None => out = &out + &mono,
                Some(a) => out = &out + &(&mono * &a.signed(n)),
            }
        }
        out
    }

    pub fn sl_specialize(&self, n: i64) -> Result<Poincare> {
        Ok(self.evaluate(n)?.sl_specialize(n))
    }

    pub fn sl_signed(&self, n: i64) -> SignedPoly {
        self.evaluate_signed(n).sl_specialize(n)
    }

    /// `(q - q^-1)` times the family, written in lifted degrees where `a`
    /// stands for `q^N`. Two families agree at every N exactly when their
    /// numerators agree.
    pub fn numerator(&self) -> SignedPoly {
        let mut out = SignedPoly::new();
        for (k, m) in &self.terms {
            let c = BigInt::from(m.clone());
            let (hi, lo) = match k.atom {
                None => (TriDegree::new(0, 1, 0), TriDegree::new(0, -1, 0)),
                Some(a) => (TriDegree::new(1, a.offset, 0), TriDegree::new(-1, -a.offset, 0)),
            };
            out.add_term(k.mono + hi, c.clone());
            out.add_term(k.mono + lo, -c);
        }
        out
    }

    /// Equality of sl(N) specializations for all N.
    pub fn sl_equivalent(&self, o: &FamilyPoincare) -> bool {
        self.numerator() == o.numerator()
    }

    pub fn is_psi_symmetric(&self) -> bool {
        self.sl_equivalent(&self.psi_dual())
    }

    pub fn total_dim_at(&self, n: i64) -> Result<BigUint> {
        Ok(self.evaluate(n)?.total_dim())
    }
}

impl fmt::Display for FamilyPoincare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let b = k.atom.map(|a| a.to_string());
            write_term(f, m, b.as_deref(), &k.mono)?;
        }
        Ok(())
    }
}

impl FromStr for FamilyPoincare {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::grammar::parse_family(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> FamilyPoincare {
        s.parse().unwrap()
    }

    #[test]
    fn bracket_strings() {
        assert_eq!(BracketAtom::new(0).exponents(3).unwrap(), vec![2, 0, -2]);
        assert!(BracketAtom::new(-2).exponents(2).unwrap().is_empty());
        assert_eq!(BracketAtom::new(-1).exponents(2).unwrap(), vec![0]);
        assert!(BracketAtom::new(-3).exponents(2).is_err());
        assert_eq!(BracketAtom::new(-3).signed(2), SignedPoly::monomial(TriDegree::ZERO, -1));
    }

    #[test]
    fn evaluate_and_min_n() {
        let h = f("[N-2] a^2 q^3 t^-3 + 2 a q t^-2");
        assert_eq!(h.min_n(), 2);
        assert_eq!(h.evaluate(2).unwrap().dim(), 2);
        assert_eq!(h.evaluate(4).unwrap().dim(), 4);
    }

    #[test]
    fn bracket_product_rejected() {
        let h = f("[N-1] a");
        assert_eq!(h.mul(&h), Err(Error::BracketProduct));
        assert!(h.mul(&f("q")).is_ok());
    }

    #[test]
    fn peeling_is_sl_equivalent() {
        // [N] at 1 equals [N-2] at 1 plus the two lifted ends a q^-1, a^-1 q.
        assert!(f("[N]").sl_equivalent(&f("[N-2] + a q^-1 + a^-1 q")));
        assert!(!f("[N]").sl_equivalent(&f("[N-2] + a q + a^-1 q^-1")));
        for n in 2..7 {
            assert_eq!(f("[N]").sl_signed(n), f("[N-2] + a q^-1 + a^-1 q").sl_signed(n));
        }
    }

    #[test]
    fn psi_keeps_brackets() {
        assert_eq!(f("[N-1] a^2 q t^-2").psi_dual(), f("[N-1] a^-2 q^-1 t^2"));
    }
}
