use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

/// An `(a, q, t)` multidegree. The t-exponent is stored doubled so that
/// half-integer homological degrees stay integral.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug, Serialize, Deserialize)]
pub struct TriDegree {
    pub a: i64,
    pub q: i64,
    pub t2: i64,
}

/// Map degrees share the shape of generator degrees.
pub type ShiftDegree = TriDegree;

impl TriDegree {
    pub const ZERO: TriDegree = TriDegree { a: 0, q: 0, t2: 0 };

    pub const fn new(a: i64, q: i64, t2: i64) -> Self {
        TriDegree { a, q, t2 }
    }

    /// Degree with an integral t-exponent.
    pub const fn at(a: i64, q: i64, t: i64) -> Self {
        TriDegree { a, q, t2: 2 * t }
    }

    pub fn has_integral_t(&self) -> bool {
        self.t2 % 2 == 0
    }

    /// Homological degree rounded toward negative infinity.
    pub fn t_floor(&self) -> i64 {
        self.t2.div_euclid(2)
    }

    /// `a -> q^n`: the bigraded (q, t) degree at sl(n), kept with `a = 0`.
    pub fn sl(&self, n: i64) -> TriDegree {
        TriDegree { a: 0, q: n * self.a + self.q, t2: self.t2 }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

impl Ord for TriDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.t2, self.a, self.q).cmp(&(other.t2, other.a, other.q))
    }
}

impl PartialOrd for TriDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for TriDegree {
    type Output = TriDegree;
    fn add(self, o: TriDegree) -> TriDegree {
        TriDegree { a: self.a + o.a, q: self.q + o.q, t2: self.t2 + o.t2 }
    }
}

impl AddAssign for TriDegree {
    fn add_assign(&mut self, o: TriDegree) {
        *self = *self + o;
    }
}

impl Sub for TriDegree {
    type Output = TriDegree;
    fn sub(self, o: TriDegree) -> TriDegree {
        TriDegree { a: self.a - o.a, q: self.q - o.q, t2: self.t2 - o.t2 }
    }
}

impl Neg for TriDegree {
    type Output = TriDegree;
    fn neg(self) -> TriDegree {
        TriDegree { a: -self.a, q: -self.q, t2: -self.t2 }
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, first: &mut bool, var: char, exp: &str) -> fmt::Result {
    if !*first {
        f.write_str(" ")?;
    }
    *first = false;
    if exp == "1" {
        write!(f, "{var}")
    } else {
        write!(f, "{var}^{exp}")
    }
}

/// Monomial form, e.g. `a^2 q^-2 t^-1/2`; the zero degree prints as `1`.
impl fmt::Display for TriDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("1");
        }
        let mut first = true;
        if self.a != 0 {
            write_factor(f, &mut first, 'a', &self.a.to_string())?;
        }
        if self.q != 0 {
            write_factor(f, &mut first, 'q', &self.q.to_string())?;
        }
        if self.t2 != 0 {
            let e = if self.t2 % 2 == 0 { (self.t2 / 2).to_string() } else { format!("{}/2", self.t2) };
            write_factor(f, &mut first, 't', &e)?;
        }
        Ok(())
    }
}
