use heartwood_core::approx::*;
use heartwood_core::catalog;
use heartwood_core::heart::cyclic_classes;
use heartwood_core::scalar::golden_alpha;
use heartwood_core::suspension::BallTree;
use heartwood_core::{IsometrySystem, Scalar, Subtree, TreePoint};

fn seg(sys: &IsometrySystem, hi: &Scalar) -> Subtree {
    let t = sys.tree();
    t.convex_hull(&[TreePoint::Vertex(0), catalog::interval_point(t, hi).unwrap()])
        .unwrap()
}

fn gold_stages(g: &IsometrySystem) -> Vec<Subtree> {
    let a = golden_alpha();
    let ends = [
        a.clone(),
        &a * &a * Scalar::from_int(2),
        &a * &Scalar::from_int(3) - Scalar::one(),
        Scalar::one(),
    ];
    ends.iter().map(|e| seg(g, e)).collect()
}

#[test]
fn stage_ends_are_orbit_points() {
    let g = catalog::sys_gold();
    let orbit = orbit_points(&g, &TreePoint::Vertex(0), 64, 10).unwrap();
    for s in gold_stages(&g) {
        for p in s.extremals() {
            assert!(orbit.contains(p), "{p}");
        }
    }
}

#[test]
fn gold_rows_decrease_to_host() {
    let g = catalog::sys_gold();
    let seq = build_sequence(&g, &gold_stages(&g)).unwrap();
    let words = cyclic_classes(2, 4);
    let tab = length_table(&seq, &words, None).unwrap();
    for (i, w) in words.iter().enumerate() {
        assert!(tab.row_monotone(i) && tab.row_above_host(i) && tab.row_ends_at_host(i), "{w}");
    }
    let host_diam = g.tree().diameter_of_tree();
    assert!(seq.diameters().iter().all(|d| d <= &host_diam));
    let r = convergence_report(&seq, 4).unwrap();
    assert!(r.strictly_decreasing());
    assert!(r.final_gap.is_zero());
}

#[test]
fn morphisms_compose() {
    let g = catalog::sys_gold();
    let seq = build_sequence(&g, &gold_stages(&g)[..3]).unwrap();
    let balls: Vec<BallTree> = seq
        .stages
        .iter()
        .map(|s| BallTree::build(&s.induced.system, 2, None).unwrap())
        .collect();
    for v in 0..balls[0].host().vertex_count() {
        let p = TreePoint::Vertex(v);
        let one = seq.morphism(0, 1, &balls[0], &balls[1], &p).unwrap();
        let two = seq.morphism(1, 2, &balls[1], &balls[2], &one).unwrap();
        assert_eq!(two, seq.morphism(0, 2, &balls[0], &balls[2], &p).unwrap());
    }
}

#[test]
fn shift_and_point_hosts() {
    let s = catalog::sys_shift();
    let stages: Vec<Subtree> = (1..=5).map(|n| seg(&s, &(Scalar::one() + Scalar::ratio(n, 10)))).collect();
    let seq = build_sequence(&s, &stages).unwrap();
    let a = s.alphabet().parse_word("a").unwrap();
    let tab = length_table(&seq, &[a], None).unwrap();
    assert!(tab.rows[0].iter().all(|c| c == &Cell::Length(Scalar::one())));

    let p = catalog::sys_point();
    let seq = build_sequence(&p, &[p.whole().clone(), p.whole().clone()]).unwrap();
    let r = convergence_report(&seq, 4).unwrap();
    assert!(r.gaps.iter().all(Scalar::is_zero));
    let words = cyclic_classes(1, 4);
    let tab = length_table(&seq, &words, None).unwrap();
    for (w, h) in words.iter().zip(&tab.host) {
        assert_eq!(h, &Cell::Length(Scalar::from_int(w.len() as i64)));
    }
}

#[test]
fn budget_marks_cells() {
    let g = catalog::sys_gold();
    let seq = build_sequence(&g, &[g.whole().clone()]).unwrap();
    let w = g.alphabet().parse_word("a.b.b").unwrap();
    let tab = length_table(&seq, &[w], Some(4)).unwrap();
    assert_eq!(tab.rows[0][0], Cell::OverBudget { needed: 7 });
}

#[test]
fn leading_empty_stages_are_skipped() {
    let g = catalog::sys_gold();
    let tiny = seg(&g, &golden_alpha().pow(4));
    let seq = build_sequence(&g, &[tiny, g.whole().clone()]).unwrap();
    assert_eq!(seq.skipped.len(), 1);
    assert_eq!(seq.stage_count(), 1);
}
