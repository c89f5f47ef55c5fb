mod common;

use common::*;
use khr_core::les::{check_exact, enumerate_candidates, for_each_vector, solve_corner, LesSpec};
use khr_core::ss::collapse_feasible;
use khr_core::{FamilyPoincare, Poincare, SignedPoly, TriDegree};
use num_bigint::BigUint;
use proptest::prelude::*;

fn q_minus_q_inv() -> SignedPoly {
    SignedPoly::from_terms([(TriDegree::new(0, 1, 0), 1), (TriDegree::new(0, -1, 0), -1)])
}

proptest! {
    #[test]
    fn psi_is_an_involution(p in poly(8)) {
        prop_assert_eq!(p.psi_dual().psi_dual(), p);
    }

    #[test]
    fn psi_respects_add_and_mul(p in poly(6), q in poly(6)) {
        prop_assert_eq!((&p + &q).psi_dual(), &p.psi_dual() + &q.psi_dual());
        prop_assert_eq!((&p * &q).psi_dual(), &p.psi_dual() * &q.psi_dual());
    }

    #[test]
    fn dims_add_and_multiply(p in poly(6), q in poly(6)) {
        prop_assert_eq!((&p + &q).total_dim(), p.total_dim() + q.total_dim());
        prop_assert_eq!((&p * &q).total_dim(), p.total_dim() * q.total_dim());
        prop_assert_eq!(p.is_empty(), p.total_dim() == BigUint::from(0u32));
    }

    #[test]
    fn euler_is_multiplicative(p in knot_poly(6), q in knot_poly(6)) {
        let lhs = (&p * &q).euler_specialize().unwrap();
        let rhs = &p.euler_specialize().unwrap() * &q.euler_specialize().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sl_specialization_is_additive(p in poly(6), q in poly(6), n in 1i64..6) {
        prop_assert_eq!((&p + &q).sl_specialize(n), &p.sl_specialize(n) + &q.sl_specialize(n));
        prop_assert_eq!(p.sl_specialize(n).total_dim(), p.total_dim());
    }

    #[test]
    fn text_round_trip(p in poly(8), f in family(5)) {
        prop_assert_eq!(p.to_string().parse::<Poincare>().unwrap(), p.clone());
        let back: FamilyPoincare = f.to_string().parse().unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), f.to_string());
    }

    #[test]
    fn numerator_tracks_every_n(f in family(5), n in 1i64..7) {
        prop_assert_eq!(f.numerator().sl_specialize(n), &f.sl_signed(n) * &q_minus_q_inv());
        if f.min_n() <= n {
            prop_assert_eq!(f.sl_specialize(n).unwrap().to_signed(), f.sl_signed(n));
        }
    }

    #[test]
    fn family_psi_matches_evaluation(f in family(5), n in 3i64..6) {
        prop_assert_eq!(f.psi_dual().evaluate_signed(n), f.evaluate_signed(n).psi_dual());
    }

    #[test]
    fn corner_accounts_for_everything(b in poly(6), c in poly(6)) {
        let spec = LesSpec::les();
        let sol = solve_corner(&spec, &b, &c);
        let mut src = sol.forced_kernel.clone();
        let mut tgt = sol.forced_cokernel.clone();
        for p in &sol.ambiguous_pairs {
            src.add_term(p.source, p.capacity.clone());
            tgt.add_term(p.target, p.capacity.clone());
        }
        prop_assert_eq!(src, b);
        prop_assert_eq!(tgt, c);
    }

    #[test]
    fn corner_candidates_are_exact(b in poly(5), c in poly(5)) {
        let spec = open_spec();
        let sol = solve_corner(&spec, &b, &c);
        let caps: Vec<u64> = sol.ambiguous_pairs.iter().map(|p| u64::try_from(&p.capacity).unwrap()).collect();
        let mut bad = Vec::new();
        for_each_vector(&caps, |v| {
            let promoted: Vec<BigUint> = v.iter().map(|&x| BigUint::from(x)).collect();
            let a = enumerate_candidates(&sol, &promoted).unwrap();
            if check_exact(&spec, &a, &b, &c).is_none() {
                bad.push(a);
            }
        }).unwrap();
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exactness_matches_brute_force_on_chains(p in les_instance(open_spec())) {
        let spec = open_spec();
        let got = check_exact(&spec, &p[0], &p[1], &p[2]);
        prop_assert_eq!(got.is_some(), brute_exact(&spec, [&p[0], &p[1], &p[2]]));
        if let Some(w) = got {
            prop_assert!(w.verify(&spec, [&p[0], &p[1], &p[2]]));
        }
    }

    #[test]
    fn exactness_matches_brute_force_on_cycles(p in les_instance(cyclic_spec())) {
        let spec = cyclic_spec();
        let got = check_exact(&spec, &p[0], &p[1], &p[2]);
        prop_assert_eq!(got.is_some(), brute_exact(&spec, [&p[0], &p[1], &p[2]]));
        if let Some(w) = got {
            prop_assert!(w.verify(&spec, [&p[0], &p[1], &p[2]]));
        }
    }

    #[test]
    fn collapse_matches_brute_force((e1, target, fam, pages) in collapse_instance()) {
        let got = collapse_feasible(&e1, &target, &fam, Some(pages)).unwrap();
        let shifts: Vec<TriDegree> = (1..=pages).map(|k| fam.degree(k)).collect();
        let expected = match e1.checked_sub(&target) {
            Some(s) => brute_collapse(&s, &shifts),
            None => false,
        };
        prop_assert_eq!(got.is_some(), expected);
        if let Some(w) = got {
            prop_assert!(w.verify(&e1, &target, &fam));
            prop_assert_eq!(e1.total_dim() - target.total_dim(), BigUint::from(2 * w.total_pairs()));
        }
    }

    #[test]
    fn collapse_onto_itself_is_free(p in knot_poly(10), fam in families()) {
        let w = collapse_feasible(&p, &p, &fam, None).unwrap().unwrap();
        prop_assert!(w.is_zero());
    }
}
