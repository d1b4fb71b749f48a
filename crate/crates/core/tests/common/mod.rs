#![allow(dead_code)]

use heartwood_core::tree::Edge;
use heartwood_core::{Field, MetricTree, Scalar, TreePoint};
use proptest::prelude::*;

/// Parent list and edge lengths `p/q`; vertex `i + 1` hangs below `parents[i]`.
#[derive(Clone, Debug)]
pub struct TreeSpec {
    pub parents: Vec<usize>,
    pub lens: Vec<(i64, i64)>,
}

impl TreeSpec {
    pub fn build(&self) -> MetricTree {
        let edges = self
            .parents
            .iter()
            .zip(&self.lens)
            .enumerate()
            .map(|(i, (&p, &(a, b)))| Edge {
                u: p,
                v: i + 1,
                len: Scalar::ratio(a, b),
            })
            .collect();
        MetricTree::new(self.parents.len() + 1, Field::Rational, edges).unwrap()
    }
}

pub fn tree_spec(max_edges: usize) -> impl Strategy<Value = TreeSpec> {
    (1..=max_edges).prop_flat_map(|m| {
        let parents: Vec<_> = (0..m).map(|i| 0..=i).collect();
        let lens = proptest::collection::vec((1i64..6, 1i64..4), m);
        (parents, lens).prop_map(|(parents, lens)| TreeSpec { parents, lens })
    })
}

/// A point on edge `e % m` at `k/4` of its length from `u`.
pub fn point_on(t: &MetricTree, e: usize, k: i64) -> TreePoint {
    let e = e % t.edges().len();
    let len = t.edges()[e].len.clone();
    t.edge_point(e, len * Scalar::ratio(k, 4)).unwrap()
}

pub fn point_strategy() -> impl Strategy<Value = (usize, i64)> {
    (0usize..64, 0i64..=4)
}

/// Distances by walking parent pointers over the edge list, without the library's LCA.
pub struct PathOracle {
    parent: Vec<Option<(usize, Scalar)>>,
    edges: Vec<Edge>,
}

impl PathOracle {
    pub fn new(t: &MetricTree) -> Self {
        let n = t.vertex_count();
        let mut adj: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
        for e in t.edges() {
            adj[e.u].push((e.v, e.len.clone()));
            adj[e.v].push((e.u, e.len.clone()));
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (u, l) in &adj[v] {
                if !seen[*u] {
                    seen[*u] = true;
                    parent[*u] = Some((v, l.clone()));
                    stack.push(*u);
                }
            }
        }
        PathOracle {
            parent,
            edges: t.edges().to_vec(),
        }
    }

    fn ancestors(&self, v: usize) -> Vec<(usize, Scalar)> {
        let mut out = vec![(v, Scalar::zero())];
        let mut cur = v;
        let mut acc = Scalar::zero();
        while let Some((p, l)) = &self.parent[cur] {
            acc = acc + l;
            out.push((*p, acc.clone()));
            cur = *p;
        }
        out
    }

    pub fn vdist(&self, a: usize, b: usize) -> Scalar {
        let aa = self.ancestors(a);
        let bb = self.ancestors(b);
        for (x, da) in &aa {
            if let Some((_, db)) = bb.iter().find(|(y, _)| y == x) {
                return da + db;
            }
        }
        unreachable!("connected tree")
    }

    /// Endpoints of a point with the distances to them.
    fn anchors(&self, p: &TreePoint) -> Vec<(usize, Scalar)> {
        match p {
            TreePoint::Vertex(v) => vec![(*v, Scalar::zero())],
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[*edge];
                vec![(e.u, offset.clone()), (e.v, &e.len - offset)]
            }
        }
    }

    pub fn dist(&self, p: &TreePoint, q: &TreePoint) -> Scalar {
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (p, q) {
            if e1 == e2 {
                return (o1 - o2).abs();
            }
        }
        let mut best: Option<Scalar> = None;
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                let d = &da + &db + self.vdist(a, b);
                if best.as_ref().is_none_or(|x| &d < x) {
                    best = Some(d);
                }
            }
        }
        best.unwrap()
    }

    /// Membership in the hull of `ext`: on a geodesic between two extremal points.
    pub fn in_hull(&self, ext: &[TreePoint], x: &TreePoint) -> bool {
        if ext.len() == 1 {
            return self.dist(&ext[0], x).is_zero();
        }
        ext.iter().enumerate().any(|(i, a)| {
            ext[i + 1..]
                .iter()
                .any(|b| self.dist(a, x) + self.dist(x, b) == self.dist(a, b))
        })
    }

    /// Vertices plus every edge cut into `g` equal parts.
    pub fn grid(&self, n: usize, g: i64) -> Vec<TreePoint> {
        let mut pts: Vec<TreePoint> = (0..n).map(TreePoint::Vertex).collect();
        for (i, e) in self.edges.iter().enumerate() {
            for k in 1..g {
                pts.push(TreePoint::Edge {
                    edge: i,
                    offset: &e.len * &Scalar::ratio(k, g),
                });
            }
        }
        pts
    }
}
