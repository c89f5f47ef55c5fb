#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use khr_core::les::LesSpec;
use khr_core::ss::DifferentialFamily;
use khr_core::{BracketAtom, FamilyPoincare, Poincare, TriDegree};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

pub fn degree() -> impl Strategy<Value = TriDegree> {
    (-2i64..=2, -3i64..=3, -4i64..=4).prop_map(|(a, q, t2)| TriDegree::new(a, q, t2))
}

pub fn knot_degree() -> impl Strategy<Value = TriDegree> {
    (-2i64..=2, -3i64..=3, -2i64..=2).prop_map(|(a, q, t)| TriDegree::at(a, q, t))
}

fn collect(terms: Vec<(TriDegree, u32)>) -> Poincare {
    Poincare::from_terms(terms)
}

pub fn poly(max_terms: usize) -> impl Strategy<Value = Poincare> {
    prop::collection::vec((degree(), 1u32..=3), 0..=max_terms).prop_map(collect)
}

pub fn knot_poly(max_terms: usize) -> impl Strategy<Value = Poincare> {
    prop::collection::vec((knot_degree(), 1u32..=3), 0..=max_terms).prop_map(collect)
}

pub fn family(max_terms: usize) -> impl Strategy<Value = FamilyPoincare> {
    (poly(max_terms), prop::collection::vec((degree(), -2i64..=1, 1u32..=2), 0..=3)).prop_map(|(p, brackets)| {
        let mut f = FamilyPoincare::from_poincare(&p);
        for (d, c, m) in brackets {
            f.add_term(d, Some(BracketAtom::new(c)), BigUint::from(m));
        }
        f
    })
}

/// Chains: the period is nonzero.
pub fn open_spec() -> LesSpec {
    LesSpec {
        name: "open".into(),
        nodes: ["A".into(), "B".into(), "C".into()],
        shifts: [TriDegree::new(0, 1, 0), TriDegree::new(0, 1, 0), TriDegree::new(0, -1, 2)],
    }
}

/// Closed 3-cycles: the shifts sum to zero.
pub fn cyclic_spec() -> LesSpec {
    LesSpec {
        name: "cyclic".into(),
        nodes: ["A".into(), "B".into(), "C".into()],
        shifts: [TriDegree::new(0, 1, 0), TriDegree::new(0, 1, 0), TriDegree::new(0, -2, 0)],
    }
}

fn small_degree() -> impl Strategy<Value = TriDegree> {
    (-1i64..=1, -2i64..=2, -2i64..=2).prop_map(|(a, q, t2)| TriDegree::new(a, q, t2))
}

/// Three polynomials built from random map ranks, optionally with one
/// monomial added or removed; at most 12 generators in total.
pub fn les_instance(spec: LesSpec) -> impl Strategy<Value = [Poincare; 3]> {
    let maps = prop::collection::vec((0usize..3, small_degree(), 1u32..=2), 0..=5);
    let perturb = prop::option::of((0usize..3, small_degree(), any::<bool>()));
    (maps, perturb).prop_map(move |(maps, perturb)| {
        let mut p = [Poincare::new(), Poincare::new(), Poincare::new()];
        let mut total = 0;
        for (node, d, r) in maps {
            if total + 2 * r > 11 {
                break;
            }
            total += 2 * r;
            p[node].add_term(d, BigUint::from(r));
            p[(node + 1) % 3].add_term(d + spec.shifts[node], BigUint::from(r));
        }
        if let Some((node, d, add)) = perturb {
            if add {
                p[node].add_term(d, BigUint::from(1u32));
            } else {
                let first = p[node].iter().next().map(|(d, _)| *d);
                if let Some(d) = first {
                    p[node].remove_term(d, &BigUint::from(1u32));
                }
            }
        }
        p
    })
}

/// Exhaustive exactness test: every assignment of ranks to the maps
/// between occupied degrees.
pub fn brute_exact(spec: &LesSpec, p: [&Poincare; 3]) -> bool {
    let mut slots: Vec<(usize, TriDegree, u64)> = Vec::new();
    for node in 0..3 {
        let next = (node + 1) % 3;
        for (d, m) in p[node].iter() {
            let bound = m.min(&p[next].get(&(*d + spec.shifts[node]))).to_u64().unwrap();
            if bound > 0 {
                slots.push((node, *d, bound));
            }
        }
    }
    let mut r = vec![0u64; slots.len()];
    loop {
        let mut rank: BTreeMap<(usize, TriDegree), u64> = BTreeMap::new();
        for (i, (node, d, _)) in slots.iter().enumerate() {
            rank.insert((*node, *d), r[i]);
        }
        let ok = (0..3).all(|node| {
            let prev = (node + 2) % 3;
            p[node].iter().all(|(d, m)| {
                let out = rank.get(&(node, *d)).copied().unwrap_or(0);
                let inc = rank.get(&(prev, *d - spec.shifts[prev])).copied().unwrap_or(0);
                BigUint::from(out + inc) == *m
            })
        });
        if ok {
            return true;
        }
        let mut i = 0;
        loop {
            if i == slots.len() {
                return false;
            }
            if r[i] < slots[i].2 {
                r[i] += 1;
                break;
            }
            r[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive pairing: can `surplus` be split into pairs `x, x + s`?
pub fn brute_collapse(surplus: &Poincare, shifts: &[TriDegree]) -> bool {
    let state: BTreeMap<TriDegree, u64> = surplus.iter().map(|(d, m)| (*d, m.to_u64().unwrap())).collect();
    let mut failed = HashSet::new();
    pair_off(state, shifts, &mut failed)
}

fn pair_off(
    state: BTreeMap<TriDegree, u64>,
    shifts: &[TriDegree],
    failed: &mut HashSet<Vec<(TriDegree, u64)>>,
) -> bool {
    let Some((&d, _)) = state.iter().next() else { return true };
    let key: Vec<_> = state.iter().map(|(d, m)| (*d, *m)).collect();
    if failed.contains(&key) {
        return false;
    }
    for s in shifts {
        for partner in [d + *s, d - *s] {
            if partner == d || !state.contains_key(&partner) {
                continue;
            }
            let mut next = state.clone();
            for x in [d, partner] {
                let m = next.get_mut(&x).unwrap();
                *m -= 1;
                if *m == 0 {
                    next.remove(&x);
                }
            }
            if pair_off(next, shifts, failed) {
                return true;
            }
        }
    }
    failed.insert(key);
    false
}

pub fn families() -> impl Strategy<Value = DifferentialFamily> {
    prop_oneof![
        Just(DifferentialFamily::d(1)),
        Just(DifferentialFamily::d(2)),
        Just(DifferentialFamily::d_minus1()),
        Just(DifferentialFamily::d(2).in_sl(2)),
        Just(DifferentialFamily::d(1).in_sl(2)),
    ]
}

/// `(E1, target, family, pages)`: a random target plus random cancelling
/// pairs, sometimes with one stray generator; at most 12 generators.
pub fn collapse_instance() -> impl Strategy<Value = (Poincare, Poincare, DifferentialFamily, i64)> {
    (
        prop::collection::vec((knot_degree(), 1u32..=2), 0..=3),
        prop::collection::vec((knot_degree(), 1i64..=3), 0..=5),
        prop::option::of(knot_degree()),
        families(),
        1i64..=3,
    )
        .prop_map(|(target, pairs, stray, fam, pages)| {
            let target = Poincare::from_terms(target.into_iter().take(2));
            let mut e1 = target.clone();
            let one = BigUint::from(1u32);
            for (x, k) in pairs {
                if e1.dim() + 2 > 12 {
                    break;
                }
                e1.add_term(x, one.clone());
                e1.add_term(x + fam.degree(k), one.clone());
            }
            if let Some(x) = stray {
                if e1.dim() < 12 {
                    e1.add_term(x, one);
                }
            }
            (e1, target, fam, pages)
        })
}
