use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded_poly::{BracketAtom, FamilyPoincare, Poincare, TriDegree};

/// `q t^-1/2 + q^-1 t^1/2`.
pub fn cone_factor() -> Poincare {
    Poincare::from_terms([(TriDegree::new(0, 1, -1), 1u32), (TriDegree::new(0, -1, 1), 1u32)])
}

/// Shift applied to the kernel in the split resolution (`q t^-1/2`).
pub const KER_SHIFT: TriDegree = TriDegree::new(0, 1, -1);
/// Shift applied to the cokernel (`q^-1 t^1/2`).
pub const COKER_SHIFT: TriDegree = TriDegree::new(0, -1, 1);

/// Reduced homology of a connected sum.
pub fn connected_sum(h1: &FamilyPoincare, h2: &FamilyPoincare) -> Result<FamilyPoincare> {
    h1.mul(h2)
}

/// Totally reduced homology of a knot: `X` acts as zero, so the result is the
/// reduced homology times the cone factor.
pub fn cone_total_reduce_knot(h: &Poincare) -> Result<Poincare> {
    if let Some(d) = h.degrees().find(|d| !d.has_integral_t()) {
        return Err(Error::HalfIntegerT(*d));
    }
    Ok(h * &cone_factor())
}

/// Exact division by the cone factor, peeling from the top t-degree.
pub fn cone_divide(h: &Poincare) -> Result<Poincare> {
    let mut rest = h.clone();
    let mut quot = Poincare::new();
    while let Some((d, m)) = rest.last_term() {
        let x = d - COKER_SHIFT;
        let low = x + KER_SHIFT;
        if !rest.remove_term(d, &m) || !rest.remove_term(low, &m) {
            return Err(Error::NotDivisible(h.to_string()));
        }
        quot.add_term(x, m);
    }
    Ok(quot)
}

/// An X-string module at a fixed N: orbits `(base, length)`, X raising q by 2.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct StringModule {
    pub orbits: Vec<(TriDegree, u64)>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TotalReduction {
    pub ker: Poincare,
    pub coker: Poincare,
    pub total: Poincare,
}

impl TotalReduction {
    fn assemble(ker: Poincare, coker: Poincare) -> TotalReduction {
        let total = &ker.shift(KER_SHIFT) + &coker.shift(COKER_SHIFT);
        TotalReduction { ker, coker, total }
    }
}

impl StringModule {
    pub fn underlying(&self) -> Poincare {
        let mut p = Poincare::new();
        for &(base, len) in &self.orbits {
            for s in 0..len as i64 {
                p.add_term(base + TriDegree::new(0, 2 * s, 0), BigUint::from(1u32));
            }
        }
        p
    }
}

/// Kernel = string tops, cokernel = string bottoms, and the split resolution
/// of the totally reduced sequence.
pub fn x_string_total_reduce(m: &StringModule) -> TotalReduction {
    let one = BigUint::from(1u32);
    let mut ker = Poincare::new();
    let mut coker = Poincare::new();
    for &(base, len) in &m.orbits {
        if len == 0 {
            continue;
        }
        ker.add_term(base + TriDegree::new(0, 2 * (len as i64 - 1), 0), one.clone());
        coker.add_term(base, one.clone());
    }
    TotalReduction::assemble(ker, coker)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum OrbitLength {
    Fixed(u64),
    Bracket(BracketAtom),
}

impl OrbitLength {
    pub fn at(&self, n: i64) -> Result<u64> {
        match *self {
            OrbitLength::Fixed(l) => Ok(l),
            OrbitLength::Bracket(a) if a.length(n) >= 0 => Ok(a.length(n) as u64),
            OrbitLength::Bracket(a) => Err(Error::NegativeBracket { offset: a.offset, n }),
        }
    }
}

/// An orbit given by its q-center; a bracket length makes it N-dependent.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Orbit {
    pub center: TriDegree,
    pub length: OrbitLength,
}

/// Orbit presentation of an N-parametric family.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct FamilyStringModule {
    pub orbits: Vec<Orbit>,
}

impl FamilyStringModule {
    pub fn underlying(&self) -> FamilyPoincare {
        let one = BigUint::from(1u32);
        let mut f = FamilyPoincare::new();
        for o in &self.orbits {
            match o.length {
                OrbitLength::Fixed(l) => {
                    for s in 0..l as i64 {
                        f.add_term(o.center + TriDegree::new(0, l as i64 - 1 - 2 * s, 0), None, one.clone());
                    }
                }
                OrbitLength::Bracket(a) => f.add_term(o.center, Some(a), one.clone()),
            }
        }
        f
    }

    /// Concrete module at `n`, keeping the a-grading.
    pub fn at(&self, n: i64) -> Result<StringModule> {
        let mut orbits = Vec::new();
        for o in &self.orbits {
            let len = o.length.at(n)?;
            if len > 0 {
                orbits.push((o.center - TriDegree::new(0, len as i64 - 1, 0), len));
            }
        }
        Ok(StringModule { orbits })
    }

    /// Concrete module at sl(n): `a` folded into q.
    pub fn sl_at(&self, n: i64) -> Result<StringModule> {
        let m = self.at(n)?;
        Ok(StringModule { orbits: m.orbits.into_iter().map(|(b, l)| (b.sl(n), l)).collect() })
    }

    /// N-independent total reduction. The top of an `[N+c]` string centered
    /// at `m` sits at `m q^{N+c-1}`, written `m a q^{c-1}` with `a = q^N`; the
    /// bottom at `m a^-1 q^{1-c}`. Agrees with `sl_at(n)` at every n where
    /// all bracket orbits are nonempty.
    pub fn lifted_total_reduce(&self) -> TotalReduction {
        let one = BigUint::from(1u32);
        let mut ker = Poincare::new();
        let mut coker = Poincare::new();
        for o in &self.orbits {
            let (top, bottom) = match o.length {
                OrbitLength::Fixed(l) => {
                    let h = l as i64 - 1;
                    (o.center + TriDegree::new(0, h, 0), o.center - TriDegree::new(0, h, 0))
                }
                OrbitLength::Bracket(a) => {
                    (o.center + TriDegree::new(1, a.offset - 1, 0), o.center + TriDegree::new(-1, 1 - a.offset, 0))
                }
            };
            ker.add_term(top, one.clone());
            coker.add_term(bottom, one.clone());
        }
        TotalReduction::assemble(ker, coker)
    }
}

impl fmt::Display for FamilyStringModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.orbits.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match o.length {
                OrbitLength::Fixed(l) => write!(f, "({}, {l})", o.center)?,
                OrbitLength::Bracket(a) if a.offset == 0 => write!(f, "({}, N)", o.center)?,
                OrbitLength::Bracket(a) => write!(f, "({}, N{:+})", o.center, a.offset)?,
            }
        }
        Ok(())
    }
}
