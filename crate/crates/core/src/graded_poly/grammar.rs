//! Text form of polynomials.
//!
//! ```text
//! poly    := term ('+' term)* | empty | '0'
//! term    := [mult] [bracket] factor*
//! bracket := '[' 'N' (('+'|'-') integer)? ']'
//! factor  := ('a'|'q'|'t') ['^' exponent]      t may take k/2
//! ```
//! Signed polynomials additionally accept '-' as a separator and a leading sign.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{BracketAtom, FamilyPoincare, Poincare, SignedPoly, TriDegree};
use crate::error::{Error, Result};

struct Term {
    negative: bool,
    mult: BigUint,
    atom: Option<BracketAtom>,
    mono: TriDegree,
    line: usize,
    col: usize,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, line: 1, col: 1, _src: src }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { line: self.line, col: self.col, msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn digits(&mut self) -> Result<String> {
        self.ws();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            return self.err("expected digits");
        }
        Ok(s)
    }

    fn small_int(&mut self) -> Result<i64> {
        let s = self.digits()?;
        match s.parse::<i64>() {
            Ok(v) if v < 1 << 40 => Ok(v),
            _ => self.err("integer out of range"),
        }
    }

    /// Exponent in halves.
    fn exponent(&mut self) -> Result<i64> {
        self.ws();
        let neg = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let num = self.small_int()?;
        self.ws();
        let halves = if self.peek() == Some('/') {
            self.bump();
            match self.small_int()? {
                1 => 2 * num,
                2 => num,
                _ => return self.err("exponent denominator must be 1 or 2"),
            }
        } else {
            2 * num
        };
        Ok(if neg { -halves } else { halves })
    }

    fn term(&mut self, negative: bool) -> Result<Term> {
        self.ws();
        let (line, col) = (self.line, self.col);
        let mut seen = false;
        let mut mult = BigUint::one();
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let s = self.digits()?;
            mult = s.parse::<BigUint>().expect("digits");
            if mult.is_zero() {
                return Err(Error::Syntax { line, col, msg: "multiplicity must be positive".into() });
            }
            seen = true;
        }
        self.ws();
        let mut atom = None;
        if self.peek() == Some('[') {
            self.bump();
            self.expect('N')?;
            self.ws();
            let off = match self.peek() {
                Some('+') => {
                    self.bump();
                    self.small_int()?
                }
                Some('-') => {
                    self.bump();
                    -self.small_int()?
                }
                _ => 0,
            };
            self.expect(']')?;
            atom = Some(BracketAtom::new(off));
            seen = true;
        }
        let mut mono = TriDegree::ZERO;
        loop {
            self.ws();
            let var = match self.peek() {
                Some(c @ ('a' | 'q' | 't')) => c,
                _ => break,
            };
            let (vl, vc) = (self.line, self.col);
            self.bump();
            seen = true;
            self.ws();
            let h = if self.peek() == Some('^') {
                self.bump();
                self.exponent()?
            } else {
                2
            };
            match var {
                't' => mono.t2 += h,
                _ if h % 2 != 0 => {
                    return Err(Error::Syntax {
                        line: vl,
                        col: vc,
                        msg: format!("exponent of {var} must be an integer"),
                    })
                }
                'a' => mono.a += h / 2,
                _ => mono.q += h / 2,
            }
        }
        if !seen {
            return self.err("expected a term");
        }
        Ok(Term { negative, mult, atom, mono, line, col })
    }

    fn poly(&mut self, signed: bool) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        self.ws();
        if self.peek().is_none() {
            return Ok(out);
        }
        if self.peek() == Some('0') && self.chars[self.pos + 1..].iter().all(|c| c.is_whitespace()) {
            return Ok(out);
        }
        let mut negative = false;
        if signed {
            match self.peek() {
                Some('-') => {
                    self.bump();
                    negative = true;
                }
                Some('+') => {
                    self.bump();
                }
                _ => {}
            }
        }
        loop {
            out.push(self.term(negative)?);
            self.ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    self.bump();
                    negative = false;
                }
                Some('-') if signed => {
                    self.bump();
                    negative = true;
                }
                Some(c) => return self.err(format!("unexpected '{c}'")),
            }
        }
        Ok(out)
    }
}

pub fn parse_family(s: &str) -> Result<FamilyPoincare> {
    let mut f = FamilyPoincare::new();
    for t in Parser::new(s).poly(false)? {
        f.add_term(t.mono, t.atom, t.mult);
    }
    Ok(f)
}

pub fn parse_poincare(s: &str) -> Result<Poincare> {
    let mut p = Poincare::new();
    for t in Parser::new(s).poly(false)? {
        if t.atom.is_some() {
            return Err(Error::Syntax { line: t.line, col: t.col, msg: "bracket atom not allowed here".into() });
        }
        p.add_term(t.mono, t.mult);
    }
    Ok(p)
}

pub fn parse_signed(s: &str) -> Result<SignedPoly> {
    let mut p = SignedPoly::new();
    for t in Parser::new(s).poly(true)? {
        if t.atom.is_some() {
            return Err(Error::Syntax { line: t.line, col: t.col, msg: "bracket atom not allowed here".into() });
        }
        let c = BigInt::from(t.mult);
        p.add_term(t.mono, if t.negative { -c } else { c });
    }
    Ok(p)
}

/// A single monomial with multiplicity one, e.g. `a^2 q^-1 t^1/2`.
pub fn parse_monomial(s: &str) -> Result<TriDegree> {
    let mut ps = Parser::new(s);
    let terms = ps.poly(false)?;
    match terms.as_slice() {
        [t] if t.mult.is_one() && t.atom.is_none() => Ok(t.mono),
        [] => Ok(TriDegree::ZERO),
        _ => Err(Error::Syntax { line: 1, col: 1, msg: "expected a single monomial".into() }),
    }
}
