//! One PASS/FAIL line per acceptance criterion.
//!
//! Criterion 6 asks for a totally reduced dimension of 48. The published
//! polynomial it also asks us to reproduce has dimension 50, so that line is
//! expected to print FAIL; every other line must pass.

mod common;

use common::*;
use khr_core::homology_db::{x_string_total_reduce, Database};
use khr_core::les::{check_exact, psi_closure, solve_corner_family, LesSpec};
use khr_core::pipeline::{run_kt, verify, ConstraintSet, Knot, Report, Status, CHECK_NS};
use khr_core::ss::{collapse_feasible, differential_vanishes, DifferentialFamily};
use khr_core::{Poincare, TriDegree};
use std::io::Write;

use proptest::test_runner::{Config, TestCaseError, TestRunner};

const EXPECTED_FAILURES: &[u32] = &[6];

struct Outcome {
    lines: Vec<(u32, bool, String)>,
}

impl Outcome {
    fn record(&mut self, n: u32, ok: bool, note: impl Into<String>) {
        let note = note.into();
        // straight to the handle so the line survives output capture
        let line = format!("criterion {n}: {} {note}\n", if ok { "PASS" } else { "FAIL" });
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        self.lines.push((n, ok, note));
    }
}

fn stage_ok(r: &Report, name: &str) -> bool {
    r.stage(name).is_some_and(|s| s.status == Status::Pass)
}

fn detail_u64(r: &Report, stage: &str, key: &str) -> Option<u64> {
    r.stage(stage)?.get(key)?.as_u64()
}

fn hopf(db: &Database) -> (bool, String) {
    let orbits = db.get("hopf+").unwrap().orbits.clone().unwrap();
    let mut ok = true;
    for n in 2..=6 {
        let tr = x_string_total_reduce(&orbits.sl_at(n).unwrap());
        let ker = Poincare::from_terms([(TriDegree::at(0, n - 1, 0), 1u32), (TriDegree::at(0, 3 * n - 1, -2), 1)]);
        let coker = Poincare::from_terms([(TriDegree::at(0, n - 1, 0), 1u32), (TriDegree::at(0, n + 3, -2), 1)]);
        ok &= tr.ker == ker && tr.coker == coker;
        ok &= tr.total == db.poincare("hopf+-total").unwrap().sl_specialize(n);
    }
    let lifted = orbits.lifted_total_reduce().total;
    let expected = db.poincare("hopf+-total").unwrap();
    ok &= lifted == expected;
    (ok, format!("total {lifted}, kernel and cokernel checked at N = 2..6"))
}

fn trefoil(db: &Database) -> (bool, String) {
    let hh = db.poincare("hopf+-total").unwrap();
    let t = db.poincare("trefoil+").unwrap();
    let ok = (2..=4).all(|n| {
        let spec = LesSpec::les().sl_specialize(n);
        let (a, b, c) = (Poincare::one(), hh.sl_specialize(n), t.sl_specialize(n));
        check_exact(&spec, &a, &b, &c).is_some_and(|w| w.verify(&spec, [&a, &b, &c]))
    });
    (ok, "witness at N = 2, 3, 4".into())
}

fn connected_sum(db: &Database) -> (bool, String) {
    let t = db.family("trefoil+").unwrap();
    let prod = db.family("hopf+").unwrap().mul(t).unwrap().mul(&t.psi_dual()).unwrap();
    let m = db.family("m+").unwrap();
    let ok = prod == *m;
    (ok, format!("{} terms", prod.terms().count()))
}

fn tables(db: &Database, r: &Report) -> (bool, String) {
    // independent generic solve, specialized at each N
    let sol = solve_corner_family(&LesSpec::ktotred(), &db.poincare("m0-total").unwrap(), db.family("m+").unwrap());
    let cl = psi_closure(&sol).unwrap();
    let (k, c) = cl.possible_columns();
    let g = db.family("table1-guaranteed").unwrap();
    let (t0, tp) = (db.poincare("table1-possible-m0").unwrap(), db.poincare("table1-possible-m+").unwrap());
    let mut ok = cl.guaranteed.sl_equivalent(g) && k == t0 && c == tp;
    for n in CHECK_NS {
        ok &= cl.guaranteed.sl_signed(n) == g.sl_signed(n);
        ok &= k.sl_specialize(n) == t0.sl_specialize(n) && c.sl_specialize(n) == tp.sl_specialize(n);
    }
    ok &= stage_ok(r, "kt.1") && stage_ok(r, "kt.2");
    let survivors = detail_u64(r, "kt.2", "survivors").unwrap_or(0);
    (
        ok,
        format!(
            "table1 records from {} pairs, table2 records from {survivors} E(1) survivors",
            sol.ambiguous_pairs.len()
        ),
    )
}

fn unique_k0(db: &Database, r: &Report) -> (bool, String) {
    let unique = detail_u64(r, "kt.3", "survivors") == Some(1) && stage_ok(r, "kt.3");
    let mut cs = ConstraintSet::default();
    cs.disable("e2").unwrap();
    let open = run_kt(db, &cs).unwrap();
    let st = open.report.stage("kt.3").unwrap();
    let without = detail_u64(&open.report, "kt.3", "survivors").unwrap_or(0);
    let ok = unique && st.status == Status::Ambiguous && without > 1;
    (ok, format!("1 survivor, {without} without the Khovanov filter"))
}

fn total_reduced(r: &Report) -> (bool, String) {
    let exact = stage_ok(r, "kt.4");
    let dim = detail_u64(r, "kt.4", "dim").unwrap_or(0);
    (exact && dim == 48, format!("polynomial exact: {exact}, dim {dim} (48 required)"))
}

fn finals(db: &Database, r: &Report, fin: &Poincare) -> (bool, String) {
    let ok = stage_ok(r, "kt.5")
        && stage_ok(r, "conway.2")
        && *fin == db.poincare("kt-final").unwrap()
        && *fin == db.poincare("conway-final").unwrap()
        && fin.dim() == 49;
    (ok, format!("dim {}", fin.dim()))
}

fn euler(db: &Database, fin: &Poincare) -> (bool, String) {
    let e = fin.euler_specialize().unwrap();
    let ok = e == *db.signed("P-kt").unwrap() && e == *db.signed("P-conway").unwrap();
    (ok, format!("{e}"))
}

fn khovanov(db: &Database, hk0: &khr_core::FamilyPoincare, fin: &Poincare) -> (bool, String) {
    let d2 = DifferentialFamily::d(2).in_sl(2);
    let kh = db.poincare("kh-kt").unwrap();
    let w = collapse_feasible(&fin.sl_specialize(2), &kh, &d2, None).unwrap();
    let pairs = w.as_ref().map(|w| (w.pairs_on_page(1), w.total_pairs())).unwrap_or((0, 0));
    let mut ok = w.is_some_and(|w| w.verify(&fin.sl_specialize(2), &kh, &d2)) && pairs == (8, 8) && kh.dim() == 33;
    let khk0 = db.poincare("kh-L10n36").unwrap();
    let e1 = hk0.sl_signed(2).to_poincare().unwrap();
    let w0 = collapse_feasible(&e1, &khk0, &d2, None).unwrap();
    ok &= w0.is_some_and(|w| w.pages.iter().all(|(k, c)| *k < 2 || c.is_empty()));
    (ok, format!("{} page-1 pairs, {} -> {}", pairs.0, fin.dim(), kh.dim()))
}

fn vanishing(fin: &Poincare) -> (bool, String) {
    // d_k(N) moves a by -2k and q by 2Nk, so past the spans nothing is joined
    let span = |f: fn(&TriDegree) -> i64| {
        let v: Vec<i64> = fin.degrees().map(f).collect();
        v.iter().max().unwrap() - v.iter().min().unwrap()
    };
    let (n_max, k_max) = (span(|d| d.q) / 2 + 1, span(|d| d.a) / 2 + 1);
    let mut hits = 0;
    for n in 3..=n_max {
        for k in 1..=k_max {
            hits += usize::from(!differential_vanishes(fin, &DifferentialFamily::d(n), k));
        }
    }
    (hits == 0, format!("d_k(N) = 0 for N = 3..{n_max}, k = 1..{k_max}"))
}

fn property_suites() -> (bool, String) {
    let cfg = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let fail = |m: String| TestCaseError::fail(m);
    let mut failures = Vec::new();
    let mut run = |name: &str, res: Result<(), String>| {
        if let Err(e) = res {
            failures.push(format!("{name}: {e}"));
        }
    };

    for spec in [open_spec(), cyclic_spec()] {
        let s = spec.clone();
        let r = TestRunner::new(cfg.clone()).run(&les_instance(spec), |p| {
            let got = check_exact(&s, &p[0], &p[1], &p[2]);
            if got.is_some() != brute_exact(&s, [&p[0], &p[1], &p[2]]) {
                return Err(fail(format!("disagrees on {p:?}")));
            }
            if got.is_some_and(|w| !w.verify(&s, [&p[0], &p[1], &p[2]])) {
                return Err(fail("bad witness".into()));
            }
            Ok(())
        });
        run(&format!("exactness ({})", s.name), r.map_err(|e| e.to_string()));
    }

    let r = TestRunner::new(cfg.clone()).run(&collapse_instance(), |(e1, target, fam, pages)| {
        let got = collapse_feasible(&e1, &target, &fam, Some(pages)).map_err(|e| fail(e.to_string()))?;
        let shifts: Vec<TriDegree> = (1..=pages).map(|k| fam.degree(k)).collect();
        let expected = e1.checked_sub(&target).is_some_and(|s| brute_collapse(&s, &shifts));
        if got.is_some() != expected {
            return Err(fail(format!("disagrees on {e1} -> {target}")));
        }
        if got.is_some_and(|w| !w.verify(&e1, &target, &fam)) {
            return Err(fail("bad witness".into()));
        }
        Ok(())
    });
    run("collapse", r.map_err(|e| e.to_string()));

    let r = TestRunner::new(cfg.clone()).run(&(poly(6), poly(6)), |(p, q)| {
        let laws = p.psi_dual().psi_dual() == p
            && (&p * &q).psi_dual() == &p.psi_dual() * &q.psi_dual()
            && (&p + &q).total_dim() == p.total_dim() + q.total_dim()
            && (&p * &q).total_dim() == p.total_dim() * q.total_dim();
        if laws {
            Ok(())
        } else {
            Err(fail(format!("{p} / {q}")))
        }
    });
    run("algebra", r.map_err(|e| e.to_string()));

    let r = TestRunner::new(cfg).run(&(knot_poly(6), knot_poly(6)), |(p, q)| {
        let lhs = (&p * &q).euler_specialize().map_err(|e| fail(e.to_string()))?;
        let rhs = &p.euler_specialize().unwrap() * &q.euler_specialize().unwrap();
        if lhs == rhs {
            Ok(())
        } else {
            Err(fail(format!("{p} / {q}")))
        }
    });
    run("euler", r.map_err(|e| e.to_string()));

    let ok = failures.is_empty();
    let note = if ok { "5 suites x 1000 cases".to_string() } else { failures.join("; ") };
    (ok, note)
}

#[test]
fn acceptance() {
    let db = Database::embedded();
    let report = verify(&db, &ConstraintSet::default(), Knot::Both).unwrap();
    let kt = run_kt(&db, &ConstraintSet::default()).unwrap();
    let fin = &kt.final_homology;

    let mut out = Outcome { lines: Vec::new() };
    let (ok, note) = hopf(&db);
    out.record(1, ok, note);
    let (ok, note) = trefoil(&db);
    out.record(2, ok, note);
    let (ok, note) = connected_sum(&db);
    out.record(3, ok, note);
    let (ok, note) = tables(&db, &report);
    out.record(4, ok, note);
    let (ok, note) = unique_k0(&db, &report);
    out.record(5, ok, note);
    let (ok, note) = total_reduced(&report);
    out.record(6, ok, note);
    let (ok, note) = finals(&db, &report, fin);
    out.record(7, ok, note);
    let (ok, note) = euler(&db, fin);
    out.record(8, ok, note);
    let (ok, note) = khovanov(&db, &kt.hk0, fin);
    out.record(9, ok, note);
    let (ok, note) = vanishing(fin);
    out.record(10, ok, note);
    let (ok, note) = property_suites();
    out.record(11, ok, note);

    let unexpected: Vec<_> = out.lines.iter().filter(|(n, ok, _)| !ok && !EXPECTED_FAILURES.contains(n)).collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
    // the known failure must stay a dimension mismatch, never a polynomial one
    assert!(stage_ok(&report, "kt.4"));
    assert_eq!(detail_u64(&report, "kt.4", "dim"), Some(50));
}
