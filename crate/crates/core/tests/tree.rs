mod common;

use common::{point_on, point_strategy, tree_spec, PathOracle};
use heartwood_core::TreePoint;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distances_match_path_oracle(spec in tree_spec(7), a in point_strategy(), b in point_strategy()) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let (p, q) = (point_on(&t, a.0, a.1), point_on(&t, b.0, b.1));
        prop_assert_eq!(t.distance(&p, &q).unwrap(), o.dist(&p, &q));
    }

    #[test]
    fn four_point(spec in tree_spec(7), pts in proptest::collection::vec(point_strategy(), 4)) {
        let t = spec.build();
        let p: Vec<TreePoint> = pts.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        prop_assert!(t.four_point(&p[0], &p[1], &p[2], &p[3]));
    }

    #[test]
    fn geodesic_iff_additive(spec in tree_spec(6), pts in proptest::collection::vec(point_strategy(), 3)) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let p: Vec<TreePoint> = pts.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let additive = o.dist(&p[0], &p[1]) + o.dist(&p[1], &p[2]) == o.dist(&p[0], &p[2]);
        let arc = t.convex_hull(&[p[0].clone(), p[2].clone()]).unwrap();
        prop_assert_eq!(additive, t.contains(&arc, &p[1]));
        let path = t.geodesic(&p[0], &p[2]).unwrap();
        for x in &path {
            prop_assert_eq!(o.dist(&p[0], x) + o.dist(x, &p[2]), o.dist(&p[0], &p[2]));
        }
    }

    #[test]
    fn median_symmetric(spec in tree_spec(7), pts in proptest::collection::vec(point_strategy(), 3)) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let p: Vec<TreePoint> = pts.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let m = t.median(&p[0], &p[1], &p[2]).unwrap();
        for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            prop_assert_eq!(&t.median(&p[a], &p[b], &p[c]).unwrap(), &m);
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            prop_assert_eq!(o.dist(&p[a], &m) + o.dist(&m, &p[b]), o.dist(&p[a], &p[b]));
        }
    }

    #[test]
    fn hull_idempotent_monotone(spec in tree_spec(7), pts in proptest::collection::vec(point_strategy(), 1..6), extra in point_strategy()) {
        let t = spec.build();
        let p: Vec<TreePoint> = pts.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let h = t.convex_hull(&p).unwrap();
        prop_assert_eq!(&t.convex_hull(h.extremals()).unwrap(), &h);
        let mut more = p.clone();
        more.push(point_on(&t, extra.0, extra.1));
        let h2 = t.convex_hull(&more).unwrap();
        prop_assert!(t.is_subset(&h, &h2));
        for x in &p {
            prop_assert!(t.contains(&h, x));
        }
    }

    #[test]
    fn hull_membership_matches_oracle(spec in tree_spec(6), pts in proptest::collection::vec(point_strategy(), 1..5)) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let p: Vec<TreePoint> = pts.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let h = t.convex_hull(&p).unwrap();
        for x in o.grid(t.vertex_count(), 4) {
            prop_assert_eq!(t.contains(&h, &x), o.in_hull(&p, &x));
        }
    }

    #[test]
    fn bridge_matches_grid_minimum(
        spec in tree_spec(6),
        a in proptest::collection::vec(point_strategy(), 1..4),
        b in proptest::collection::vec(point_strategy(), 1..4),
    ) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let pa: Vec<TreePoint> = a.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let pb: Vec<TreePoint> = b.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let ha = t.convex_hull(&pa).unwrap();
        let hb = t.convex_hull(&pb).unwrap();
        let grid = o.grid(t.vertex_count(), 4);
        let ga: Vec<&TreePoint> = grid.iter().filter(|x| o.in_hull(&pa, x)).collect();
        let gb: Vec<&TreePoint> = grid.iter().filter(|x| o.in_hull(&pb, x)).collect();
        let mut best = None;
        for x in &ga {
            for y in &gb {
                let d = o.dist(x, y);
                if best.as_ref().is_none_or(|m| &d < m) {
                    best = Some(d);
                }
            }
        }
        let br = t.bridge(&ha, &hb).unwrap();
        prop_assert_eq!(&br.length, &best.unwrap());
        prop_assert!(t.contains(&ha, &br.start) && t.contains(&hb, &br.end));
        prop_assert_eq!(br.degenerate, !t.intersect(&ha, &hb).unwrap().is_empty());
    }

    #[test]
    fn projection_is_nearest(spec in tree_spec(6), a in proptest::collection::vec(point_strategy(), 1..4), x in point_strategy()) {
        let t = spec.build();
        let o = PathOracle::new(&t);
        let pa: Vec<TreePoint> = a.iter().map(|&(e, k)| point_on(&t, e, k)).collect();
        let h = t.convex_hull(&pa).unwrap();
        let x = point_on(&t, x.0, x.1);
        let pr = t.project(&h, &x).unwrap();
        prop_assert!(t.contains(&h, &pr));
        for g in o.grid(t.vertex_count(), 4).iter().filter(|g| o.in_hull(&pa, g)) {
            prop_assert!(o.dist(&x, &pr) <= o.dist(&x, g));
        }
    }
}
