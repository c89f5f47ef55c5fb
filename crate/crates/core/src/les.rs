//! Three-periodic long exact sequences of graded spaces, at the level of
//! Poincare polynomials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded_poly::{FamilyPoincare, Poincare, ShiftDegree, TriDegree};

/// `A -f-> B -g-> C -h-> A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesSpec {
    pub name: String,
    pub nodes: [String; 3],
    pub shifts: [ShiftDegree; 3],
}

impl LesSpec {
    /// `H(L,i) -X-> H(L,i) -> HH(L) -> H(L,i)`, the last two of q,t-degree (-1, 1/2).
    pub fn totred() -> LesSpec {
        LesSpec {
            name: "TOTRED".into(),
            nodes: ["H(L,i)".into(), "H(L,i)".into(), "HH(L)".into()],
            shifts: [TriDegree::new(0, 2, 0), TriDegree::new(0, -1, 1), TriDegree::new(0, -1, 1)],
        }
    }

    /// Crossing change sequence `H(K-) -> HH(K0) -> H(K+) -> H(K-)`; the
    /// sl(N) degree (N, -1/2) is written as `a t^-1/2`, (-2N, 2) as `a^-2 t^2`.
    pub fn les() -> LesSpec {
        LesSpec {
            name: "LES".into(),
            nodes: ["H(K-)".into(), "HH(K0)".into(), "H(K+)".into()],
            shifts: [TriDegree::new(1, 0, -1), TriDegree::new(1, 0, -1), TriDegree::new(-2, 0, 4)],
        }
    }

    /// `H(L-) -> HH(K) -> H(L+) -> H(L-)` with the same degrees as `les`.
    pub fn ktotred() -> LesSpec {
        LesSpec {
            name: "KTOTRED".into(),
            nodes: ["H(L-)".into(), "HH(K)".into(), "H(L+)".into()],
            shifts: [TriDegree::new(1, 0, -1), TriDegree::new(1, 0, -1), TriDegree::new(-2, 0, 4)],
        }
    }

    pub fn builtin(name: &str) -> Option<LesSpec> {
        match name.to_ascii_uppercase().as_str() {
            "TOTRED" => Some(Self::totred()),
            "LES" => Some(Self::les()),
            "KTOTRED" => Some(Self::ktotred()),
            _ => None,
        }
    }

    /// The same sequence in sl(n) grading (`a -> q^n`).
    pub fn sl_specialize(&self, n: i64) -> LesSpec {
        LesSpec {
            name: format!("{}@sl({n})", self.name),
            nodes: self.nodes.clone(),
            shifts: self.shifts.map(|s| s.sl(n)),
        }
    }

    /// Rotates roles so that node `C` becomes `A`.
    pub fn rotate(&self) -> LesSpec {
        let [a, b, c] = self.nodes.clone();
        let [f, g, h] = self.shifts;
        LesSpec { name: format!("{}'", self.name), nodes: [c, a, b], shifts: [h, f, g] }
    }

    /// Sum of the three shifts: the degree gained going once around.
    pub fn period(&self) -> TriDegree {
        self.shifts[0] + self.shifts[1] + self.shifts[2]
    }
}

/// Kernel polynomials at each node. Exactness at the dimension level reads
/// `K_B = f(P_A - K_A)`, `K_C = g(P_B - K_B)`, `K_A = h(P_C - K_C)` with
/// `0 <= K <= P`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactnessWitness {
    pub k_a: Poincare,
    pub k_b: Poincare,
    pub k_c: Poincare,
}

impl ExactnessWitness {
    pub fn verify(&self, spec: &LesSpec, p: [&Poincare; 3]) -> bool {
        let k = [&self.k_a, &self.k_b, &self.k_c];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let Some(rank) = p[i].checked_sub(k[i]) else { return false };
            if rank.shift(spec.shifts[i]) != *k[j] {
                return false;
            }
        }
        true
    }
}

/// Decides exactness. Every node of the degree lattice has one incoming
/// and one outgoing map, so occupied degrees split into chains (or 3-cycles
/// when the period is zero) whose ranks are forced by alternating sums.
pub fn check_exact(spec: &LesSpec, pa: &Poincare, pb: &Poincare, pc: &Poincare) -> Option<ExactnessWitness> {
    let p = [pa, pb, pc];
    let occupied = |node: usize, d: &TriDegree| p[node].contains_degree(d);
    let pred = |node: usize, d: TriDegree| -> (usize, TriDegree) {
        let prev = (node + 2) % 3;
        (prev, d - spec.shifts[prev])
    };
    let succ = |node: usize, d: TriDegree| -> (usize, TriDegree) { ((node + 1) % 3, d + spec.shifts[node]) };

    // rank[node][d] = rank of the map leaving `node` at degree `d`.
    let mut rank: [BTreeMap<TriDegree, BigUint>; 3] = Default::default();
    let mut seen: BTreeSet<(usize, TriDegree)> = BTreeSet::new();
    for start_node in 0..3 {
        for &d0 in p[start_node].degrees() {
            if seen.contains(&(start_node, d0)) {
                continue;
            }
            // walk back to the start of the run
            let (mut n, mut d) = (start_node, d0);
            let mut cyclic = false;
            loop {
                let (pn, pd) = pred(n, d);
                if !occupied(pn, &pd) {
                    break;
                }
                if (pn, pd) == (start_node, d0) {
                    cyclic = true;
                    break;
                }
                (n, d) = (pn, pd);
            }
            let mut run = vec![(n, d)];
            loop {
                let (sn, sd) = succ(run.last().unwrap().0, run.last().unwrap().1);
                if !occupied(sn, &sd) || (sn, sd) == run[0] {
                    break;
                }
                run.push((sn, sd));
            }
            for v in &run {
                seen.insert(*v);
            }
            let dims: Vec<BigInt> = run.iter().map(|(n, d)| BigInt::from(p[*n].get(d))).collect();
            let ranks = if cyclic { cycle_ranks(&dims)? } else { chain_ranks(&dims)? };
            for ((n, d), r) in run.iter().zip(ranks) {
                if !r.is_zero() {
                    rank[*n].insert(*d, r);
                }
            }
        }
    }
    let image = |node: usize| -> Poincare {
        Poincare::from_terms(rank[node].iter().map(|(d, r)| (*d + spec.shifts[node], r.clone())))
    };
    Some(ExactnessWitness { k_a: image(2), k_b: image(0), k_c: image(1) })
}

/// Ranks along an open chain: `dims[i] = r[i-1] + r[i]`, `r[-1] = r[last] = 0`.
fn chain_ranks(dims: &[BigInt]) -> Option<Vec<BigUint>> {
    let mut out = Vec::with_capacity(dims.len());
    let mut prev = BigInt::zero();
    for d in dims {
        let r = d - &prev;
        if r.is_negative() {
            return None;
        }
        out.push(r.to_biguint()?);
        prev = r;
    }
    if !prev.is_zero() {
        return None;
    }
    Some(out)
}

/// Closed cycle of length 3: unique solution by half-sums.
fn cycle_ranks(dims: &[BigInt]) -> Option<Vec<BigUint>> {
    if dims.len() != 3 {
        return None;
    }
    let mut out = Vec::new();
    for i in 0..3 {
        // r_i leaves node i: r_i = (dims[i] + dims[i+1] - dims[i+2]) / 2
        let num = &dims[i] + &dims[(i + 1) % 3] - &dims[(i + 2) % 3];
        if num.is_negative() || (&num % 2u32) != BigInt::zero() {
            return None;
        }
        out.push((num / 2u32).to_biguint()?);
    }
    Some(out)
}

/// Source/target mass that may or may not cancel under `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmbiguousPair {
    /// Degree in `B`.
    pub source: TriDegree,
    /// `source + d_g`, degree in `C`.
    pub target: TriDegree,
    #[serde(serialize_with = "ser_big")]
    pub capacity: BigUint,
    /// What a surviving pair adds to `A`: `source - d_f` and `target + d_h`.
    pub kernel_side: TriDegree,
    pub cokernel_side: TriDegree,
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

impl AmbiguousPair {
    /// The pair whose surviving kernel generator sits at `x` in `A`.
    pub fn from_kernel_side(spec: &LesSpec, x: TriDegree, capacity: BigUint) -> Self {
        Self::new(spec, x + spec.shifts[0], capacity)
    }

    fn new(spec: &LesSpec, source: TriDegree, capacity: BigUint) -> Self {
        let target = source + spec.shifts[1];
        AmbiguousPair {
            source,
            target,
            capacity,
            kernel_side: source - spec.shifts[0],
            cokernel_side: target + spec.shifts[2],
        }
    }

    /// Both `A`-side generators, `k` copies.
    pub fn contribution(&self, k: &BigUint) -> Poincare {
        Poincare::from_terms([(self.kernel_side, k.clone()), (self.cokernel_side, k.clone())])
    }
}

/// Solution of `A` given `B` and `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerSolution {
    pub guaranteed: Poincare,
    /// Part of `B` forced into `ker g` (B degrees).
    pub forced_kernel: Poincare,
    /// Part of `C` forced into `coker g` (C degrees).
    pub forced_cokernel: Poincare,
    pub ambiguous_pairs: Vec<AmbiguousPair>,
}

/// Degree matching of `g: B -> C`: at each target degree the mass
/// `min(B, C)` is ambiguous and the excess on either side is forced.
fn match_points(spec: &LesSpec, pb: &Poincare, points_c: &Poincare) -> (Poincare, Poincare, Vec<AmbiguousPair>) {
    let g = spec.shifts[1];
    let mut fk = Poincare::new();
    let mut fc = Poincare::new();
    let mut pairs = Vec::new();
    let image = pb.shift(g);
    let degrees: BTreeSet<TriDegree> = image.degrees().chain(points_c.degrees()).copied().collect();
    for d in degrees {
        let b = image.get(&d);
        let c = points_c.get(&d);
        let cap = (&b).min(&c).clone();
        fk.add_term(d - g, &b - &cap);
        fc.add_term(d, &c - &cap);
        if !cap.is_zero() {
            pairs.push(AmbiguousPair::new(spec, d - g, cap));
        }
    }
    (fk, fc, pairs)
}

pub fn solve_corner(spec: &LesSpec, pb: &Poincare, pc: &Poincare) -> CornerSolution {
    let (fk, fc, pairs) = match_points(spec, pb, pc);
    let guaranteed = &fk.shift(-spec.shifts[0]) + &fc.shift(spec.shifts[2]);
    CornerSolution { guaranteed, forced_kernel: fk, forced_cokernel: fc, ambiguous_pairs: pairs }
}

/// `promoted[i]` copies of pair `i` survive; the rest cancel.
pub fn enumerate_candidates(sol: &CornerSolution, promoted: &[BigUint]) -> Result<Poincare> {
    let mut out = sol.guaranteed.clone();
    for (p, k) in pairs_with_counts(&sol.ambiguous_pairs, promoted)? {
        out = &out + &p.contribution(k);
    }
    Ok(out)
}

fn pairs_with_counts<'a>(
    pairs: &'a [AmbiguousPair],
    promoted: &'a [BigUint],
) -> Result<impl Iterator<Item = (&'a AmbiguousPair, &'a BigUint)>> {
    if promoted.len() > pairs.len() || promoted.iter().zip(pairs).any(|(k, p)| k > &p.capacity) {
        return Err(Error::Record("promotion exceeds the ambiguous pairs".into()));
    }
    Ok(pairs.iter().zip(promoted))
}

/// Corner solution when `C` is an N-parametric family and `B` is plain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCornerSolution {
    pub guaranteed: FamilyPoincare,
    pub forced_kernel: Poincare,
    pub forced_cokernel: FamilyPoincare,
    pub ambiguous_pairs: Vec<AmbiguousPair>,
}

impl FamilyCornerSolution {
    pub fn candidate(&self, promoted: &[BigUint]) -> Result<FamilyPoincare> {
        let mut out = self.guaranteed.clone();
        for (p, k) in pairs_with_counts(&self.ambiguous_pairs, promoted)? {
            out = out.add(&p.contribution(k).into());
        }
        Ok(out)
    }
}

impl From<CornerSolution> for FamilyCornerSolution {
    fn from(s: CornerSolution) -> Self {
        FamilyCornerSolution {
            guaranteed: s.guaranteed.into(),
            forced_kernel: s.forced_kernel,
            forced_cokernel: s.forced_cokernel.into(),
            ambiguous_pairs: s.ambiguous_pairs,
        }
    }
}

/// Family version of `solve_corner`. A string `m [N+c]` of `C` whose lifted
/// top `m a q^{c-1}` (or bottom `m a^-1 q^{1-c}`) is hit by the image of
/// `B` is peeled off, `m [N+c] = top + (m q^-1) [N+c-1]`, and each peeled end
/// is matched like a plain generator; the rest of the string is forced into
/// the cokernel. Valid for every N large enough that the strings are long.
pub fn solve_corner_family(spec: &LesSpec, pb: &Poincare, pc: &FamilyPoincare) -> FamilyCornerSolution {
    let g = spec.shifts[1];
    let image = pb.shift(g);
    let mut points = pc.atom_free_part();
    let mut peeled = Poincare::new();
    let mut strings = FamilyPoincare::new();
    for (m, atom, mult) in pc.terms() {
        let Some(atom) = atom else { continue };
        let (mut center, mut c) = (m, atom.offset);
        let top = m + TriDegree::new(1, atom.offset - 1, 0);
        let bottom = m + TriDegree::new(-1, 1 - atom.offset, 0);
        if image.contains_degree(&top) {
            peeled.add_term(top, mult.clone());
            center += TriDegree::new(0, -1, 0);
            c -= 1;
        }
        if image.contains_degree(&bottom) {
            peeled.add_term(bottom, mult.clone());
            center += TriDegree::new(0, 1, 0);
            c -= 1;
        }
        strings.add_term(center, Some(crate::graded_poly::BracketAtom::new(c)), mult.clone());
    }
    points = &points + &peeled;
    let (fk, fc, pairs) = match_points(spec, pb, &points);
    let fc_family = FamilyPoincare::from_poincare(&fc).add(&strings);
    let guaranteed = FamilyPoincare::from_poincare(&fk.shift(-spec.shifts[0])).add(&fc_family.shift(spec.shifts[2]));
    FamilyCornerSolution { guaranteed, forced_kernel: fk, forced_cokernel: fc_family, ambiguous_pairs: pairs }
}

/// Result of imposing psi-symmetry on a corner solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiClosure {
    /// Guaranteed part plus every pair that all symmetric candidates share.
    pub guaranteed: FamilyPoincare,
    /// `(pair, lower bound, upper bound)` over symmetric candidates, for
    /// pairs with some freedom left.
    pub possible: Vec<(AmbiguousPair, BigUint, BigUint)>,
    /// Pairs that no symmetric candidate promotes.
    pub discarded: Vec<AmbiguousPair>,
    pub symmetric_candidates: usize,
}

impl PsiClosure {
    /// The "possible" columns: kernel-side and cokernel-side generators.
    pub fn possible_columns(&self) -> (Poincare, Poincare) {
        let mut k = Poincare::new();
        let mut c = Poincare::new();
        for (p, lo, hi) in &self.possible {
            k.add_term(p.kernel_side, hi - lo);
            c.add_term(p.cokernel_side, hi - lo);
        }
        (k, c)
    }
}

/// Upper bound on enumerated promotion vectors.
pub const SEARCH_LIMIT: u128 = 50_000_000;

/// All promotion vectors `0 <= n_i <= cap_i`, in lexicographic order.
pub fn for_each_vector(caps: &[u64], mut f: impl FnMut(&[u64])) -> Result<()> {
    let size: u128 = caps.iter().map(|&c| c as u128 + 1).product();
    if size > SEARCH_LIMIT {
        return Err(Error::SearchTooLarge(size));
    }
    let mut v = vec![0u64; caps.len()];
    loop {
        f(&v);
        let mut i = caps.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if v[i] < caps[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
        }
    }
}

/// Promotion vectors whose candidate is psi-symmetric for every N.
pub fn symmetric_promotions(sol: &FamilyCornerSolution) -> Result<Vec<Vec<u64>>> {
    let caps: Vec<u64> = sol.ambiguous_pairs.iter().map(|p| p.capacity.to_u64().unwrap_or(u64::MAX)).collect();
    let base = sol.guaranteed.numerator();
    let pair_nums: Vec<_> = sol
        .ambiguous_pairs
        .iter()
        .map(|p| FamilyPoincare::from_poincare(&p.contribution(&BigUint::from(1u32))).numerator())
        .collect();
    let mut out = Vec::new();
    for_each_vector(&caps, |v| {
        let mut num = base.clone();
        for (k, pn) in v.iter().zip(&pair_nums) {
            for _ in 0..*k {
                num = &num + pn;
            }
        }
        // psi acts on numerators by degree negation and a sign flip
        if num == num.psi_dual().neg() {
            out.push(v.to_vec());
        }
    })?;
    Ok(out)
}

/// Support of a set of promotion vectors: `guaranteed` gains the common
/// lower bound, the rest is returned as `(pair, lo, hi)`.
pub fn promotion_support(sol: &FamilyCornerSolution, vectors: &[Vec<u64>]) -> PsiClosure {
    let n = sol.ambiguous_pairs.len();
    if vectors.is_empty() {
        return PsiClosure {
            guaranteed: sol.guaranteed.clone(),
            possible: Vec::new(),
            discarded: sol.ambiguous_pairs.clone(),
            symmetric_candidates: 0,
        };
    }
    let lo: Vec<u64> = (0..n).map(|i| vectors.iter().map(|v| v[i]).min().unwrap_or(0)).collect();
    let hi: Vec<u64> = (0..n).map(|i| vectors.iter().map(|v| v[i]).max().unwrap_or(0)).collect();
    let mut guaranteed = sol.guaranteed.clone();
    let mut possible = Vec::new();
    let mut discarded = Vec::new();
    for (i, p) in sol.ambiguous_pairs.iter().enumerate() {
        let (l, h) = (BigUint::from(lo[i]), BigUint::from(hi[i]));
        guaranteed = guaranteed.add(&p.contribution(&l).into());
        if h == BigUint::zero() {
            discarded.push(p.clone());
        } else if h > l {
            possible.push((p.clone(), l, h));
        }
    }
    PsiClosure { guaranteed, possible, discarded, symmetric_candidates: vectors.len() }
}

/// Enumerates promotions of `sol`, keeps the psi-symmetric ones and moves
/// their common lower bound into the guaranteed part.
pub fn psi_closure(sol: &FamilyCornerSolution) -> Result<PsiClosure> {
    Ok(promotion_support(sol, &symmetric_promotions(sol)?))
}
