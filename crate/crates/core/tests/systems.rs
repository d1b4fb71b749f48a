use heartwood_core::catalog;
use heartwood_core::words::enumerate_reduced;
use heartwood_core::{Error, GeneratorSpec, IsometrySystem, MetricTree, Scalar, TreePoint, Word};
use proptest::prelude::*;

/// Extremal points of `s` plus the median of the first three (or the midpoint of two).
fn sample(t: &MetricTree, s: &heartwood_core::Subtree) -> Vec<TreePoint> {
    let e = s.extremals();
    let mut out = e.to_vec();
    if e.len() >= 2 {
        let d = t.distance(&e[0], &e[1]).unwrap();
        out.push(t.point_at(&e[0], &e[1], &d.half()).unwrap());
    }
    out
}

#[test]
fn inverse_domain_is_image() {
    for (name, sys) in catalog::all() {
        let t = sys.tree();
        for n in 0..=6 {
            for w in enumerate_reduced(sys.rank(), n) {
                let img = sys.image(&w);
                assert_eq!(sys.dom(&w.inverse()), img, "{name} {w}");
                for y in sample(t, &img) {
                    let x = sys.apply(&y, &w.inverse()).unwrap().expect("inside dom(w⁻¹)");
                    assert_eq!(sys.apply(&x, &w).unwrap(), Some(y.clone()), "{name} {w}");
                }
            }
        }
    }
}

#[test]
fn prefix_monotone() {
    // dom(w) ⊆ dom(w minus its last letter) for every w up to length 8; chains give all prefixes
    for (name, sys) in catalog::all() {
        let t = sys.tree();
        let mut prev: std::collections::BTreeMap<Word, heartwood_core::Subtree> =
            [(Word::empty(), sys.whole().clone())].into();
        for n in 1..=8 {
            let mut cur = std::collections::BTreeMap::new();
            for w in enumerate_reduced(sys.rank(), n) {
                let d = sys.dom(&w);
                assert!(t.is_subset(&d, &prev[&w.prefix(n - 1)]), "{name} {w}");
                cur.insert(w, d);
            }
            prev = cur;
        }
    }
}

#[test]
fn admissible_is_subword_closed() {
    for (name, sys) in catalog::all() {
        for n in 1..=6 {
            for w in enumerate_reduced(sys.rank(), n).filter(|w| sys.is_admissible(w)) {
                for i in 0..n {
                    for j in i + 1..=n {
                        assert!(sys.is_admissible(&w.subword(i, j)), "{name} {w}");
                    }
                }
                assert!(sys.is_admissible(&w.inverse()), "{name} {w}");
            }
        }
    }
}

proptest! {
    #[test]
    fn maps_preserve_distance(word in 0usize..200, s in 0i64..=8, r in 0i64..=8) {
        let sys = catalog::sys_gold();
        let t = sys.tree();
        let words: Vec<Word> = (1..=4).flat_map(|n| enumerate_reduced(2, n)).collect();
        let w = &words[word % words.len()];
        let d = sys.dom(w);
        prop_assume!(!d.is_empty());
        let pts = sample(t, &d);
        let (p, q) = (&pts[s as usize % pts.len()], &pts[r as usize % pts.len()]);
        // a point strictly between two domain points also lies in the domain
        let mid = t.point_at(p, q, &t.distance(p, q).unwrap().half()).unwrap();
        for (x, y) in [(p, q), (p, &mid)] {
            let (fx, fy) = (sys.apply(x, w).unwrap().unwrap(), sys.apply(y, w).unwrap().unwrap());
            prop_assert_eq!(t.distance(&fx, &fy).unwrap(), t.distance(x, y).unwrap());
        }
    }
}

#[test]
fn bad_image_is_named() {
    let k = MetricTree::segment(Scalar::from_int(2), heartwood_core::Field::Rational).unwrap();
    let p = |x: i64| catalog::interval_point(&k, &Scalar::from_int(x)).unwrap();
    let spec = GeneratorSpec {
        name: "a".into(),
        domain: vec![p(0), p(1)],
        images: vec![p(0), p(2)],
    };
    let err = IsometrySystem::new(k.clone(), heartwood_core::Alphabet::standard(1), vec![spec]).unwrap_err();
    assert!(matches!(err, Error::IsometryViolation { ref generator, .. } if generator == "a"), "{err:?}");
}

#[test]
fn probe_verdicts() {
    use heartwood_core::system::ProbeVerdict;
    for sys in [catalog::sys_id(), catalog::sys_reflect()] {
        let r = sys.independent_generators_probe(4, 64).unwrap();
        match r.verdict {
            ProbeVerdict::Fails { word, .. } => assert!(sys.word_map(&word).fixes_pointwise()),
            v => panic!("{v:?}"),
        }
    }
}
