//! Spectral sequence collapse at the level of graded dimensions.
//!
//! A page removes pairs `x, x + deg(k)`. Every differential here moves the
//! t-degree by an odd integer, so occupied degrees split into two classes by
//! the parity of `floor(t)` and a collapse is a perfect matching of the
//! surplus `E1 - target`, found by max-flow.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::dinics;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded_poly::{Poincare, ShiftDegree, TriDegree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DifferentialKind {
    /// `d_k(N)` of degree `(-2k, 2Nk, 1)`.
    Sl(i64),
    /// `d_k(-1)` of degree `(2-2k, 2-2k, 2k-1)`.
    Minus1,
}

/// A family of differentials, optionally read in the sl(n) grading of its
/// polynomials (`a` folded into `q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialFamily {
    pub kind: DifferentialKind,
    pub grading: Option<i64>,
}

impl DifferentialFamily {
    pub fn d(n: i64) -> Self {
        DifferentialFamily { kind: DifferentialKind::Sl(n), grading: None }
    }

    pub fn d_minus1() -> Self {
        DifferentialFamily { kind: DifferentialKind::Minus1, grading: None }
    }

    /// The same differentials acting on sl(n)-specialized polynomials.
    pub fn in_sl(self, n: i64) -> Self {
        DifferentialFamily { grading: Some(n), ..self }
    }

    pub fn degree(&self, k: i64) -> ShiftDegree {
        let d = match self.kind {
            DifferentialKind::Sl(n) => TriDegree::at(-2 * k, 2 * n * k, 1),
            DifferentialKind::Minus1 => TriDegree::at(2 - 2 * k, 2 - 2 * k, 2 * k - 1),
        };
        match self.grading {
            Some(n) => d.sl(n),
            None => d,
        }
    }

    fn constant_in_k(&self) -> bool {
        self.degree(1) == self.degree(2)
    }

    /// Largest page whose differential joins two occupied degrees of `p`.
    pub fn default_max_pages(&self, p: &Poincare) -> i64 {
        let bound = if self.constant_in_k() { 1 } else { span(p) + 1 };
        (1..=bound).rev().find(|&k| !self.vanishes_on(p, k)).unwrap_or(0)
    }

    fn vanishes_on(&self, p: &Poincare, k: i64) -> bool {
        let s = self.degree(k);
        !p.degrees().any(|d| p.contains_degree(&(*d + s)))
    }
}

fn span(p: &Poincare) -> i64 {
    let (mut lo, mut hi) = ([i64::MAX; 3], [i64::MIN; 3]);
    for d in p.degrees() {
        for (i, v) in [d.a, d.q, d.t2].into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    (0..3).map(|i| hi[i].saturating_sub(lo[i])).max().unwrap_or(0).max(0)
}

impl fmt::Display for DifferentialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DifferentialKind::Sl(n) => write!(f, "d({n})")?,
            DifferentialKind::Minus1 => f.write_str("d(-1)")?,
        }
        if let Some(n) = self.grading {
            write!(f, " in sl({n}) grading")?;
        }
        Ok(())
    }
}

/// `pages[k-1] = c_k`; page `k` removes `c_k * (1 + deg(k))`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CancellationWitness {
    pub pages: Vec<(i64, Poincare)>,
}

impl CancellationWitness {
    pub fn pairs_on_page(&self, k: i64) -> u64 {
        self.pages.iter().filter(|(j, _)| *j == k).map(|(_, c)| c.dim()).sum()
    }

    pub fn total_pairs(&self) -> u64 {
        self.pages.iter().map(|(_, c)| c.dim()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pages.iter().all(|(_, c)| c.is_empty())
    }

    /// Highest page with a nonzero cancellation.
    pub fn last_active_page(&self) -> Option<i64> {
        self.pages.iter().filter(|(_, c)| !c.is_empty()).map(|(k, _)| *k).max()
    }

    /// Replays the pages from `e1`; `None` if some page goes negative.
    pub fn replay(&self, e1: &Poincare, fam: &DifferentialFamily) -> Option<Vec<Poincare>> {
        let mut cur = e1.clone();
        let mut out = vec![cur.clone()];
        for (k, c) in &self.pages {
            let gone = c + &c.shift(fam.degree(*k));
            cur = cur.checked_sub(&gone)?;
            out.push(cur.clone());
        }
        Some(out)
    }

    pub fn verify(&self, e1: &Poincare, target: &Poincare, fam: &DifferentialFamily) -> bool {
        self.replay(e1, fam).is_some_and(|pages| pages.last() == Some(target))
    }
}

const INF: u64 = u64::MAX / 4;

/// Perfect matching of `surplus` along the given page degrees.
fn match_surplus(surplus: &Poincare, fam: &DifferentialFamily, max_pages: i64) -> Result<Option<CancellationWitness>> {
    let mut pages: Vec<(i64, Poincare)> = (1..=max_pages).map(|k| (k, Poincare::new())).collect();
    if surplus.is_empty() {
        return Ok(Some(CancellationWitness { pages }));
    }
    let total = surplus.total_dim();
    if (&total % 2u32) != BigUint::zero() {
        return Ok(None);
    }
    let cap = |m: &BigUint| m.to_u64().filter(|&v| v < INF).ok_or(Error::SearchTooLarge(u128::MAX));
    let mut g: DiGraph<(), u64> = DiGraph::new();
    let s = g.add_node(());
    let t = g.add_node(());
    let mut idx: BTreeMap<TriDegree, NodeIndex> = BTreeMap::new();
    let even = |d: &TriDegree| d.t_floor().rem_euclid(2) == 0;
    for (d, m) in surplus.iter() {
        let n = g.add_node(());
        idx.insert(*d, n);
        if even(d) {
            g.add_edge(s, n, cap(m)?);
        } else {
            g.add_edge(n, t, cap(m)?);
        }
    }
    // one edge per joined pair, labelled by the lowest page joining them
    let mut joins: BTreeMap<(TriDegree, TriDegree), (i64, TriDegree)> = BTreeMap::new();
    for k in 1..=max_pages {
        let sh = fam.degree(k);
        if sh.is_zero() {
            continue;
        }
        for d in surplus.degrees() {
            let up = *d + sh;
            if !surplus.contains_degree(&up) {
                continue;
            }
            let key = if even(d) { (*d, up) } else { (up, *d) };
            joins.entry(key).or_insert((k, *d));
        }
    }
    let mut labelled = Vec::new();
    for ((u, v), (k, low)) in &joins {
        let e = g.add_edge(idx[u], idx[v], INF);
        labelled.push((e, *k, *low));
    }
    let (flow, flows) = dinics(&g, s, t);
    if BigUint::from(flow) * 2u32 != total {
        return Ok(None);
    }
    for (e, k, low) in labelled {
        let f = flows[e.index()];
        if f > 0 {
            pages[(k - 1) as usize].1.add_term(low, BigUint::from(f));
        }
    }
    Ok(Some(CancellationWitness { pages }))
}

/// Finds cancellations taking `e1` to `target` using pages `1..=max_pages`
/// (`None`: `fam.default_max_pages(e1)`).
pub fn collapse_feasible(
    e1: &Poincare,
    target: &Poincare,
    fam: &DifferentialFamily,
    max_pages: Option<i64>,
) -> Result<Option<CancellationWitness>> {
    let Some(surplus) = e1.checked_sub(target) else { return Ok(None) };
    let max_pages = max_pages.unwrap_or_else(|| fam.default_max_pages(e1));
    match_surplus(&surplus, fam, max_pages)
}

/// No generator of `p` is joined to another by `deg(k)`.
pub fn differential_vanishes(p: &Poincare, fam: &DifferentialFamily, k: i64) -> bool {
    fam.vanishes_on(p, k)
}

/// Collapse onto a single generator in t-degree `t2 / 2`; the first
/// feasible survivor in degree order is returned.
pub fn converge_to_point(
    e1: &Poincare,
    fam: &DifferentialFamily,
    survivor_t2: i64,
) -> Result<Option<(CancellationWitness, TriDegree)>> {
    if (&e1.total_dim() % 2u32).is_zero() {
        return Ok(None);
    }
    for d in e1.degrees().filter(|d| d.t2 == survivor_t2) {
        let target = Poincare::monomial(*d);
        if let Some(w) = collapse_feasible(e1, &target, fam, None)? {
            return Ok(Some((w, *d)));
        }
    }
    Ok(None)
}

/// Collapse of an sl-graded polynomial onto one q-string
/// `q^e (q^{len-1} + ... + q^{1-len})` in t-degree `t2 / 2`. Returns the
/// witness and the center `e` of the first feasible string.
pub fn converge_to_string(
    e1: &Poincare,
    fam: &DifferentialFamily,
    len: u64,
    survivor_t2: i64,
) -> Result<Option<(CancellationWitness, TriDegree)>> {
    if len == 0 {
        return Ok(collapse_feasible(e1, &Poincare::new(), fam, None)?.map(|w| (w, TriDegree::ZERO)));
    }
    let h = len as i64 - 1;
    let layer = e1.at_t2(survivor_t2);
    let mut centers: Vec<TriDegree> = layer.degrees().map(|d| *d - TriDegree::new(0, h, 0)).collect();
    centers.dedup();
    for c in centers {
        let target = Poincare::from_terms((0..len as i64).map(|s| (c + TriDegree::new(0, h - 2 * s, 0), 1u32)));
        if let Some(w) = collapse_feasible(e1, &target, fam, None)? {
            return Ok(Some((w, c)));
        }
    }
    Ok(None)
}
