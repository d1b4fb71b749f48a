use heartwood_core::catalog;
use heartwood_core::heart::*;
use heartwood_core::lamination::unit_cylinder_leaves;
use heartwood_core::scalar::golden_alpha;
use heartwood_core::words::{fib_gen, InfiniteWord, Letter};
use heartwood_core::{Scalar, TreePoint, Word};

#[test]
fn ray_on_chained_points() {
    let p = catalog::sys_point();
    let a = InfiniteWord::periodic(&p.alphabet().parse_word("a").unwrap()).unwrap();
    let QkStatus::Ray(r) = qk_eval(&p, &a, 6, None).unwrap() else { panic!("not a ray") };
    assert!(r.nested && r.is_monotone());
    assert_eq!(r.dead_at, 2);
    for i in 0..=4 {
        assert!(r.certificates.contains(&(i, i + 2)));
    }
    // consecutive convergents are one copy apart
    let d = r.distances();
    for w in d.windows(2) {
        assert_eq!(&w[1] - &w[0], Scalar::one());
    }
    assert_eq!(r.gap, d[5]);
}

#[test]
fn eventually_admissible_split() {
    let g = catalog::sys_gold();
    let (a, b) = (Letter::positive(0), Letter::positive(1));
    let x = fib_gen(a, b).prepend(a).unwrap().prepend(a).unwrap();
    match qk_eval(&g, &x, 12, None).unwrap() {
        QkStatus::EventuallyAdmissible { split, prefix, tail_domain, .. } => {
            assert!(split <= 2);
            assert_eq!(prefix, x.prefix(split).unwrap());
            assert!(!tail_domain.is_empty());
        }
        s => panic!("{}", s.label()),
    }
}

#[test]
fn prefix_equivariance() {
    let (a, b) = (Letter::positive(0), Letter::positive(1));
    for (sys, x) in [
        (catalog::sys_gold(), fib_gen(a, b)),
        (catalog::sys_gold(), fib_gen(b, a).tail()),
        (catalog::sys_id(), InfiniteWord::periodic(&Word::letter(a)).unwrap()),
    ] {
        let t = sys.tree();
        for n in 4..=8 {
            let d = sys.infinite_dom(&x, n).unwrap();
            if d.domain.is_empty() {
                continue;
            }
            let mut tail = x.clone();
            for i in 1..=3 {
                tail = tail.tail();
                let xi = x.prefix(i).unwrap();
                let moved = sys.word_map(&xi).map_subtree(t, &d.domain);
                let td = sys.infinite_dom(&tail, n - i).unwrap().domain;
                let expect = t.intersect(&td, &sys.image(&xi)).unwrap();
                assert_eq!(moved, expect, "n={n} i={i}");
            }
        }
    }
}

#[test]
fn limit_sets_refine_and_hearts_shrink() {
    for (name, sys) in catalog::all() {
        let t = sys.tree();
        let sets: Vec<LimitSet> = (1..=8).map(|n| limit_set_approx(&sys, n).unwrap()).collect();
        for n in 1..sets.len() {
            assert!(sets[n].refines(&sys, &sets[n - 1]), "{name} n={}", n + 1);
        }
        let hearts: Vec<Heart> = (1..=8).map(|n| heart_approx(&sys, n).unwrap()).collect();
        for n in 1..hearts.len() {
            assert!(t.is_subset(&hearts[n].hull, &hearts[n - 1].hull), "{name}");
            for s in &sets[n..] {
                assert!(t.is_subset(&s.hull(&sys), &hearts[n].hull));
            }
        }
        for s in &sets {
            for p in &s.pieces {
                assert!(t.is_subset(p, sys.whole()));
            }
        }
    }
}

#[test]
fn pieces_are_leaf_domains() {
    let g = catalog::sys_gold();
    let t = g.tree();
    for n in 1..=5 {
        let leaves = unit_cylinder_leaves(&g, n).unwrap();
        let ls = limit_set_approx(&g, n).unwrap();
        for l in &leaves {
            let d = t.intersect(&g.dom(&l.x), &g.dom(&l.y)).unwrap();
            assert!(ls.pieces.contains(&d));
        }
        assert!(ls.pieces.iter().all(|p| leaves.iter().any(|l| &l.domain == p)));
    }
}

#[test]
fn gold_heart_spans_interval() {
    let g = catalog::sys_gold();
    let t = g.tree();
    let a4 = golden_alpha().pow(4);
    let h = heart_approx(&g, 8).unwrap();
    for x in [a4.clone(), Scalar::one() - a4] {
        assert!(t.contains(&h.hull, &catalog::interval_point(t, &x).unwrap()));
    }
    let p = geometric_probe(&g, 10).unwrap();
    assert!(p.stabilizes());
    assert_eq!(p.rows.last().unwrap().extremal_points, 2);
    assert!(p.rows.iter().all(|r| r.branch_points == 0));
}

#[test]
fn self_audit_is_clean() {
    for (name, sys) in catalog::all() {
        let r = theorem_audit(&sys, sys.whole(), 4, 2, 8).unwrap();
        assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
        assert!(r.cond3.holds() && r.cond2.holds(), "{name}");
        assert_eq!(r.lengths_equal(), Some(true), "{name}");
    }
}

#[test]
fn small_subtree_misses_limit_pieces() {
    let g = catalog::sys_gold();
    let t = g.tree();
    let kp = t
        .convex_hull(&[
            TreePoint::Vertex(0),
            catalog::interval_point(t, &golden_alpha().pow(4)).unwrap(),
        ])
        .unwrap();
    let r = theorem_audit(&g, &kp, 6, 2, 8).unwrap();
    let Check::Fails(piece) = &r.cond3 else { panic!("COND3 should fail") };
    assert!(t.intersect(piece, &kp).unwrap().is_empty());
    assert!(matches!(r.cond2, Check::NotApplicable(_)));
}
