//! Finite metric trees, points on them, and closed subtrees.
//!
//! A tree is rooted at vertex 0. Each non-root vertex stores the edge to its
//! parent and its exact distance from the root; every geometric query reduces
//! to climbing towards the root. Closed subtrees are stored as the minimal
//! sorted list of their extremal points.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

pub type VertexId = usize;
pub type EdgeId = usize;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

fn fresh_uid() -> u64 {
    NEXT_UID.fetch_add(1, AtomicOrdering::Relaxed)
}

/// A point of a tree: a vertex, or a position strictly inside an edge.
///
/// `offset` is measured from the edge's `u` endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreePoint {
    Vertex(VertexId),
    Edge { edge: EdgeId, offset: Scalar },
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreePoint::Vertex(v) => write!(f, "v{v}"),
            TreePoint::Edge { edge, offset } => write!(f, "e{edge}@{offset}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub len: Scalar,
}

/// A point given by the child vertex below it and its distance above that vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Loc {
    c: VertexId,
    s: Scalar,
}

/// A closed subtree, stored as the convex hull of its extremal points.
#[derive(Clone, Debug, Eq)]
pub struct Subtree {
    tree: u64,
    ext: Vec<TreePoint>,
}

impl PartialEq for Subtree {
    fn eq(&self, other: &Self) -> bool {
        self.ext == other.ext
    }
}

impl core::hash::Hash for Subtree {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.ext.hash(state);
    }
}

impl Ord for Subtree {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.extremals().cmp(other.extremals())
    }
}

impl PartialOrd for Subtree {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Subtree {
    pub fn empty() -> Self {
        Subtree {
            tree: 0,
            ext: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ext.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.ext.len() == 1
    }

    /// Extremal points in canonical (sorted) order.
    pub fn extremals(&self) -> &[TreePoint] {
        &self.ext
    }
}

/// The shortest arc between two subtrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bridge {
    pub start: TreePoint,
    pub end: TreePoint,
    pub length: Scalar,
    /// True when the subtrees meet and the bridge is a single common point.
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct MetricTree {
    uid: u64,
    field: Field,
    edges: Vec<Edge>,
    up: Vec<Option<EdgeId>>,
    parent: Vec<VertexId>,
    rd: Vec<Scalar>,
    rdf: Vec<f64>,
    adj: Vec<Vec<EdgeId>>,
}

impl PartialEq for MetricTree {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.up.len() == other.up.len() && self.edges == other.edges
    }
}

impl Eq for MetricTree {}

impl MetricTree {
    /// Builds a tree on vertices `0..n`; vertex 0 becomes the root.
    pub fn new(n: usize, field: Field, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("a tree needs at least one vertex"));
        }
        if edges.len() + 1 != n {
            return Err(Error::input(alloc::format!(
                "{} vertices need {} edges, got {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::input(alloc::format!("edge {i} has an unknown endpoint")));
            }
            if e.u == e.v {
                return Err(Error::input(alloc::format!("edge {i} is a loop")));
            }
            if !e.len.is_positive() {
                return Err(Error::input(alloc::format!("edge {i} has non-positive length")));
            }
            if !field.contains(&e.len) {
                return Err(Error::input(alloc::format!(
                    "edge {i} length {} is outside the field {field}",
                    e.len
                )));
            }
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        let mut up = vec![None; n];
        let mut parent = vec![0; n];
        let mut rd = vec![Scalar::zero(); n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &e in &adj[x] {
                let y = if edges[e].u == x { edges[e].v } else { edges[e].u };
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                up[y] = Some(e);
                parent[y] = x;
                rd[y] = &rd[x] + &edges[e].len;
                queue.push_back(y);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::input(alloc::format!("vertex {v} is not connected to vertex 0")));
        }
        let rdf = rd.iter().map(Scalar::to_f64).collect();
        Ok(MetricTree {
            uid: fresh_uid(),
            field,
            edges,
            up,
            parent,
            rd,
            rdf,
            adj,
        })
    }

    /// The segment `[0, len]` with vertices 0 and 1.
    pub fn segment(len: Scalar, field: Field) -> Result<Self> {
        MetricTree::new(2, field, vec![Edge { u: 0, v: 1, len }])
    }

    /// A star with centre 0 and one leg per length.
    pub fn star(lens: &[Scalar], field: Field) -> Result<Self> {
        let edges = lens
            .iter()
            .enumerate()
            .map(|(i, l)| Edge {
                u: 0,
                v: i + 1,
                len: l.clone(),
            })
            .collect();
        MetricTree::new(lens.len() + 1, field, edges)
    }

    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vertex_count(&self) -> usize {
        self.up.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.up[v].map(|_| self.parent[v])
    }

    /// Vertices of degree at most one.
    pub fn leaves(&self) -> Vec<VertexId> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) <= 1).collect()
    }

    /// Vertices of degree at least three.
    pub fn branch_points(&self) -> Vec<VertexId> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) >= 3).collect()
    }

    /// The whole tree as a subtree.
    pub fn whole(&self) -> Subtree {
        let pts: Vec<TreePoint> = self.leaves().into_iter().map(TreePoint::Vertex).collect();
        self.hull_of(&pts)
    }

    pub fn diameter_of_tree(&self) -> Scalar {
        self.diameter(&self.whole())
    }

    /// Sum of all edge lengths.
    pub fn total_length(&self) -> Scalar {
        self.edges.iter().fold(Scalar::zero(), |acc, e| &acc + &e.len)
    }

    // ----- points -----

    fn len_up(&self, c: VertexId) -> &Scalar {
        &self.edges[self.up[c].expect("root has no parent edge")].len
    }

    fn loc(&self, p: &TreePoint) -> Loc {
        match p {
            TreePoint::Vertex(v) => Loc {
                c: *v,
                s: Scalar::zero(),
            },
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[*edge];
                if self.up[e.v] == Some(*edge) {
                    Loc {
                        c: e.v,
                        s: &e.len - offset,
                    }
                } else {
                    Loc {
                        c: e.u,
                        s: offset.clone(),
                    }
                }
            }
        }
    }

    fn point(&self, l: &Loc) -> TreePoint {
        if l.s.is_zero() {
            return TreePoint::Vertex(l.c);
        }
        let e = self.up[l.c].expect("offset above the root");
        let edge = &self.edges[e];
        let offset = if edge.v == l.c { &edge.len - &l.s } else { l.s.clone() };
        TreePoint::Edge { edge: e, offset }
    }

    fn rd_of(&self, l: &Loc) -> Scalar {
        &self.rd[l.c] - &l.s
    }

    /// Errors unless `p` is a canonical point of this tree.
    pub fn check_point(&self, p: &TreePoint) -> Result<()> {
        match p {
            TreePoint::Vertex(v) if *v < self.vertex_count() => Ok(()),
            TreePoint::Vertex(v) => Err(Error::input(alloc::format!("no vertex {v}"))),
            TreePoint::Edge { edge, offset } => {
                let e = self
                    .edges
                    .get(*edge)
                    .ok_or_else(|| Error::input(alloc::format!("no edge {edge}")))?;
                if !offset.is_positive() || offset >= &e.len {
                    return Err(Error::input(alloc::format!(
                        "offset {offset} is not strictly inside edge {edge}"
                    )));
                }
                if !self.field.contains(offset) {
                    return Err(Error::input(alloc::format!("offset {offset} is outside {}", self.field)));
                }
                Ok(())
            }
        }
    }

    /// The point at `offset` from `u` along edge `e`, normalised to a vertex at the ends.
    pub fn edge_point(&self, e: EdgeId, offset: Scalar) -> Result<TreePoint> {
        let edge = self
            .edges
            .get(e)
            .ok_or_else(|| Error::input(alloc::format!("no edge {e}")))?;
        if offset.is_negative() || offset > edge.len {
            return Err(Error::input(alloc::format!("offset {offset} is outside edge {e}")));
        }
        if offset.is_zero() {
            return Ok(TreePoint::Vertex(edge.u));
        }
        if offset == edge.len {
            return Ok(TreePoint::Vertex(edge.v));
        }
        Ok(TreePoint::Edge { edge: e, offset })
    }

    pub fn vertex_at(&self, p: &TreePoint) -> Option<VertexId> {
        match p {
            TreePoint::Vertex(v) => Some(*v),
            _ => None,
        }
    }

    fn climb(&self, l: &Loc, t: &Scalar) -> Loc {
        let mut c = l.c;
        let mut s = l.s.clone();
        let mut t = t.clone();
        loop {
            if t.is_zero() {
                return Loc { c, s };
            }
            assert!(self.up[c].is_some(), "climbed past the root");
            let room = self.len_up(c) - &s;
            match t.cmp(&room) {
                Ordering::Less => {
                    return Loc { c, s: &s + &t };
                }
                _ => {
                    t = &t - &room;
                    c = self.parent[c];
                    s = Scalar::zero();
                }
            }
        }
    }

    fn rd_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        let (x, y) = (self.rdf[a], self.rdf[b]);
        let tol = 1e-9 * (1.0 + x.abs().max(y.abs()));
        if x + tol < y {
            Ordering::Less
        } else if y + tol < x {
            Ordering::Greater
        } else {
            self.rd[a].cmp(&self.rd[b])
        }
    }

    fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while a != b {
            match self.rd_cmp(a, b) {
                Ordering::Greater => a = self.parent[a],
                Ordering::Less => b = self.parent[b],
                Ordering::Equal => {
                    a = self.parent[a];
                    b = self.parent[b];
                }
            }
        }
        a
    }

    /// The highest point of the arc between `p` and `q`, and the arc length.
    fn meet(&self, p: &Loc, q: &Loc) -> (Loc, Scalar) {
        let l = self.lca(p.c, q.c);
        if l == p.c && l == q.c {
            let m = if p.s >= q.s { p.clone() } else { q.clone() };
            let d = (&p.s - &q.s).abs();
            return (m, d);
        }
        if l == p.c {
            return (p.clone(), self.rd_of(q) - self.rd_of(p));
        }
        if l == q.c {
            return (q.clone(), self.rd_of(p) - self.rd_of(q));
        }
        let m = Loc {
            c: l,
            s: Scalar::zero(),
        };
        let d = self.rd_of(p) + self.rd_of(q) - &self.rd[l] - &self.rd[l];
        (m, d)
    }

    /// The vertex at or directly below `p`.
    pub(crate) fn child_vertex(&self, p: &TreePoint) -> VertexId {
        self.loc(p).c
    }

    pub(crate) fn dist(&self, p: &TreePoint, q: &TreePoint) -> Scalar {
        if p == q {
            return Scalar::zero();
        }
        self.meet(&self.loc(p), &self.loc(q)).1
    }

    /// The point of `[p, q]` at distance `t` from `p`; `t` is clamped to the arc.
    pub(crate) fn at(&self, p: &TreePoint, q: &TreePoint, t: &Scalar) -> TreePoint {
        let (lp, lq) = (self.loc(p), self.loc(q));
        let (m, d) = self.meet(&lp, &lq);
        if !t.is_positive() {
            return p.clone();
        }
        if t >= &d {
            return q.clone();
        }
        let up = self.rd_of(&lp) - self.rd_of(&m);
        let l = if t <= &up {
            self.climb(&lp, t)
        } else {
            self.climb(&lq, &(&d - t))
        };
        self.point(&l)
    }

    fn gromov(&self, x: &TreePoint, y: &TreePoint, base: &TreePoint) -> Scalar {
        (self.dist(base, x) + self.dist(base, y) - self.dist(x, y)).half()
    }

    pub(crate) fn on_arc(&self, p: &TreePoint, q: &TreePoint, x: &TreePoint) -> bool {
        self.dist(p, x) + self.dist(x, q) == self.dist(p, q)
    }

    pub(crate) fn mid(&self, p: &TreePoint, q: &TreePoint, r: &TreePoint) -> TreePoint {
        let t = self.gromov(q, r, p);
        self.at(p, q, &t)
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> Result<Scalar> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.dist(p, q))
    }

    /// The point of `[p, q]` at distance `t` from `p`.
    pub fn point_at(&self, p: &TreePoint, q: &TreePoint, t: &Scalar) -> Result<TreePoint> {
        self.check_point(p)?;
        self.check_point(q)?;
        let d = self.dist(p, q);
        if t.is_negative() || t > &d {
            return Err(Error::input(alloc::format!("distance {t} is outside an arc of length {d}")));
        }
        Ok(self.at(p, q, t))
    }

    /// The arc `[p, q]`: `p`, the vertices passed in order, then `q`.
    pub fn geodesic(&self, p: &TreePoint, q: &TreePoint) -> Result<Vec<TreePoint>> {
        self.check_point(p)?;
        self.check_point(q)?;
        let (lp, lq) = (self.loc(p), self.loc(q));
        let (m, _) = self.meet(&lp, &lq);
        let top = self.rd_of(&m);
        let climb_vertices = |l: &Loc| {
            let mut out = Vec::new();
            let mut v = if l.s.is_zero() { l.c } else { self.parent[l.c] };
            if !l.s.is_zero() && self.up[l.c].is_none() {
                return out;
            }
            while self.rd[v] >= top {
                out.push(TreePoint::Vertex(v));
                match self.up[v] {
                    Some(_) => v = self.parent[v],
                    None => break,
                }
            }
            out
        };
        let mut path = vec![p.clone()];
        path.extend(climb_vertices(&lp));
        path.push(self.point(&m));
        let mut back = climb_vertices(&lq);
        back.reverse();
        path.extend(back);
        path.push(q.clone());
        path.dedup();
        Ok(path)
    }

    /// The unique point common to the three arcs between `p`, `q` and `r`.
    pub fn median(&self, p: &TreePoint, q: &TreePoint, r: &TreePoint) -> Result<TreePoint> {
        self.check_point(p)?;
        self.check_point(q)?;
        self.check_point(r)?;
        Ok(self.mid(p, q, r))
    }

    /// True if the two largest pairwise sums of the quadruple agree.
    pub fn four_point(&self, p: &TreePoint, q: &TreePoint, r: &TreePoint, s: &TreePoint) -> bool {
        let mut sums = [
            self.dist(p, q) + self.dist(r, s),
            self.dist(p, r) + self.dist(q, s),
            self.dist(p, s) + self.dist(q, r),
        ];
        sums.sort();
        sums[1] == sums[2]
    }

    // ----- subtrees -----

    pub fn check_subtree(&self, s: &Subtree) -> Result<()> {
        if !s.ext.is_empty() && s.tree != self.uid {
            return Err(Error::input("subtree belongs to a different tree"));
        }
        Ok(())
    }

    /// Wraps an extremal list produced by trusted code.
    pub(crate) fn subtree_raw(&self, mut ext: Vec<TreePoint>) -> Subtree {
        ext.sort();
        ext.dedup();
        Subtree { tree: self.uid, ext }
    }

    fn in_hull(&self, q: &[TreePoint], x: &TreePoint) -> bool {
        match q {
            [] => false,
            [q0] => q0 == x,
            [q0, rest @ ..] => {
                let d0 = self.dist(x, q0);
                if d0.is_zero() {
                    return true;
                }
                rest.iter().any(|qi| &d0 + &self.dist(x, qi) == self.dist(q0, qi))
            }
        }
    }

    pub(crate) fn hull_of(&self, pts: &[TreePoint]) -> Subtree {
        let mut v: Vec<TreePoint> = pts.to_vec();
        v.sort();
        v.dedup();
        let mut i = 0;
        while i < v.len() && v.len() > 1 {
            let x = v.remove(i);
            if self.in_hull(&v, &x) {
                continue;
            }
            v.insert(i, x);
            i += 1;
        }
        Subtree { tree: self.uid, ext: v }
    }

    /// The smallest closed subtree containing `pts`.
    pub fn convex_hull(&self, pts: &[TreePoint]) -> Result<Subtree> {
        for p in pts {
            self.check_point(p)?;
        }
        Ok(self.hull_of(pts))
    }

    pub fn contains(&self, s: &Subtree, p: &TreePoint) -> bool {
        self.in_hull(&s.ext, p)
    }

    /// `a ⊆ b`.
    pub fn is_subset(&self, a: &Subtree, b: &Subtree) -> bool {
        a.ext.iter().all(|p| self.contains(b, p))
    }

    pub fn diameter(&self, s: &Subtree) -> Scalar {
        let mut best = Scalar::zero();
        for (i, p) in s.ext.iter().enumerate() {
            for q in &s.ext[i + 1..] {
                let d = self.dist(p, q);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Distance from `p` to a nonempty subtree.
    pub(crate) fn dist_to(&self, s: &Subtree, p: &TreePoint) -> Scalar {
        let q0 = &s.ext[0];
        let mut t = self.dist(p, q0);
        for qi in &s.ext[1..] {
            let g = self.gromov(q0, qi, p);
            if g < t {
                t = g;
            }
        }
        t
    }

    /// The nearest point of a nonempty subtree.
    pub(crate) fn proj(&self, s: &Subtree, p: &TreePoint) -> TreePoint {
        let t = self.dist_to(s, p);
        self.at(p, &s.ext[0], &t)
    }

    pub fn project(&self, s: &Subtree, p: &TreePoint) -> Result<TreePoint> {
        self.check_subtree(s)?;
        self.check_point(p)?;
        if s.is_empty() {
            return Err(Error::input("projection onto the empty subtree"));
        }
        Ok(self.proj(s, p))
    }

    pub(crate) fn meet_subtrees(&self, a: &Subtree, b: &Subtree) -> Subtree {
        if a.is_empty() || b.is_empty() {
            return Subtree::empty();
        }
        let probe = self.proj(b, &a.ext[0]);
        if !self.contains(a, &probe) {
            return Subtree::empty();
        }
        let mut pts: Vec<TreePoint> = a.ext.iter().map(|x| self.proj(b, x)).collect();
        pts.extend(b.ext.iter().map(|y| self.proj(a, y)));
        self.hull_of(&pts)
    }

    pub fn intersect(&self, a: &Subtree, b: &Subtree) -> Result<Subtree> {
        self.check_subtree(a)?;
        self.check_subtree(b)?;
        Ok(self.meet_subtrees(a, b))
    }

    pub(crate) fn bridge_unchecked(&self, a: &Subtree, b: &Subtree) -> Bridge {
        let end = self.proj(b, &a.ext[0]);
        let start = self.proj(a, &end);
        let length = self.dist(&start, &end);
        Bridge {
            degenerate: length.is_zero(),
            start,
            end,
            length,
        }
    }

    /// The arc joining two nonempty subtrees; flagged degenerate when they meet.
    pub fn bridge(&self, a: &Subtree, b: &Subtree) -> Result<Bridge> {
        self.check_subtree(a)?;
        self.check_subtree(b)?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::input("bridge needs two nonempty subtrees"));
        }
        Ok(self.bridge_unchecked(a, b))
    }

    /// The far end of `⋃_m ⋂_{n≥m} [q, P_n]` over the given finite sequence.
    ///
    /// Only tails of length at least two contribute, so a finite list
    /// does not collapse to its last element.
    pub fn liminf_from(&self, q: &TreePoint, seq: &[TreePoint]) -> Result<TreePoint> {
        self.check_point(q)?;
        for p in seq {
            self.check_point(p)?;
        }
        let Some(first) = seq.first() else {
            return Err(Error::input("liminf of an empty sequence"));
        };
        if seq.len() == 1 {
            return Ok(first.clone());
        }
        let mut best: Option<(Scalar, usize)> = None;
        for m in 0..seq.len() - 1 {
            let mut t = self.dist(q, &seq[m]);
            for n in m + 1..seq.len() {
                let g = self.gromov(&seq[m], &seq[n], q);
                if g < t {
                    t = g;
                }
            }
            if best.as_ref().is_none_or(|(b, _)| &t > b) {
                best = Some((t, m));
            }
        }
        let (t, m) = best.expect("at least one tail");
        Ok(self.at(q, &seq[m], &t))
    }

    /// True if the union of `parts` contains the arc `[a, b]`.
    pub fn arc_covered(&self, a: &TreePoint, b: &TreePoint, parts: &[Subtree]) -> bool {
        let seg = self.hull_of(&[a.clone(), b.clone()]);
        let len = self.dist(a, b);
        let mut spans: Vec<(Scalar, Scalar)> = parts
            .iter()
            .map(|p| self.meet_subtrees(&seg, p))
            .filter(|m| !m.is_empty())
            .map(|m| {
                let mut ds: Vec<Scalar> = m.ext.iter().map(|x| self.dist(a, x)).collect();
                ds.sort();
                (ds[0].clone(), ds[ds.len() - 1].clone())
            })
            .collect();
        if spans.is_empty() {
            return false;
        }
        spans.sort();
        let mut reach = Scalar::zero();
        for (lo, hi) in spans {
            if lo > reach {
                return false;
            }
            if hi > reach {
                reach = hi;
            }
        }
        reach == len
    }

    /// True if the union of `parts` is the whole tree.
    pub fn covers(&self, parts: &[Subtree]) -> bool {
        if self.edges.is_empty() {
            return parts.iter().any(|p| !p.is_empty());
        }
        self.edges
            .iter()
            .all(|e| self.arc_covered(&TreePoint::Vertex(e.u), &TreePoint::Vertex(e.v), parts))
    }

    /// True if any two of `parts` share at most a single point.
    pub fn interiors_disjoint(&self, parts: &[Subtree]) -> bool {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let m = self.meet_subtrees(&parts[i], &parts[j]);
                if m.ext.len() > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Points of `s` that are vertices of the tree.
    pub fn vertices_in(&self, s: &Subtree) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.contains(s, &TreePoint::Vertex(v)))
            .collect()
    }

    /// Vertices of `s` with at least three directions into `s`.
    pub fn branch_points_of(&self, s: &Subtree) -> Vec<VertexId> {
        if s.ext.len() < 3 {
            return Vec::new();
        }
        self.vertices_in(s)
            .into_iter()
            .filter(|&v| {
                let here = TreePoint::Vertex(v);
                let dirs = self
                    .edges
                    .iter()
                    .filter_map(|e| {
                        if e.u == v {
                            Some(e.v)
                        } else if e.v == v {
                            Some(e.u)
                        } else {
                            None
                        }
                    })
                    .filter(|&u| {
                        let u = TreePoint::Vertex(u);
                        s.ext.iter().any(|x| self.gromov(&u, x, &here).is_positive())
                    })
                    .count();
                dirs >= 3
            })
            .collect()
    }

    // ----- mutation, used by tree builders -----

    /// Makes `p` a vertex, splitting its edge if needed.
    pub(crate) fn split_at(&mut self, p: &TreePoint) -> VertexId {
        let l = self.loc(p);
        if l.s.is_zero() {
            return l.c;
        }
        let e = self.up[l.c].expect("interior point has an edge");
        let p_old = self.parent[l.c];
        let len = self.edges[e].len.clone();
        let m = self.vertex_count();
        let upper = &len - &l.s;
        // edge e keeps its child endpoint; the other endpoint becomes m
        if self.edges[e].v == l.c {
            self.edges[e].u = m;
        } else {
            self.edges[e].v = m;
        }
        self.edges[e].len = l.s.clone();
        let ne = self.edges.len();
        self.edges.push(Edge {
            u: p_old,
            v: m,
            len: upper,
        });
        for x in self.adj[p_old].iter_mut() {
            if *x == e {
                *x = ne;
            }
        }
        self.adj.push(vec![ne, e]);
        self.up.push(Some(ne));
        self.parent.push(p_old);
        let r = self.rd_of(&l);
        self.rdf.push(r.to_f64());
        self.rd.push(r);
        self.parent[l.c] = m;
        self.uid = fresh_uid();
        m
    }

    /// Makes the point at distance `s` above vertex `c` a vertex.
    pub(crate) fn split_above(&mut self, c: VertexId, s: &Scalar) -> VertexId {
        let l = self.climb(&Loc { c, s: Scalar::zero() }, s);
        let p = self.point(&l);
        self.split_at(&p)
    }

    /// Hangs a new leaf below `v` at distance `len`.
    pub(crate) fn add_leaf(&mut self, v: VertexId, len: Scalar) -> VertexId {
        let w = self.vertex_count();
        let e = self.edges.len();
        let r = &self.rd[v] + &len;
        self.edges.push(Edge { u: v, v: w, len });
        self.adj[v].push(e);
        self.adj.push(vec![e]);
        self.up.push(Some(e));
        self.parent.push(v);
        self.rdf.push(r.to_f64());
        self.rd.push(r);
        self.uid = fresh_uid();
        w
    }

    /// Extracts a nonempty subtree as a tree of its own.
    pub fn extract(&self, s: &Subtree) -> Result<Embedding> {
        self.check_subtree(s)?;
        if s.is_empty() {
            return Err(Error::input("cannot extract the empty subtree"));
        }
        let mut work = self.clone();
        let mut origin: Vec<TreePoint> = (0..self.vertex_count()).map(TreePoint::Vertex).collect();
        let mut ext_vertices = Vec::new();
        for p in &s.ext {
            let l = self.loc(p);
            let before = work.vertex_count();
            let v = work.split_above(l.c, &l.s);
            if v >= before {
                origin.push(p.clone());
            }
            ext_vertices.push(TreePoint::Vertex(v));
        }
        let ws = work.hull_of(&ext_vertices);
        let inside: Vec<VertexId> = work.vertices_in(&ws);
        let mut index = vec![usize::MAX; work.vertex_count()];
        // root the extracted tree at its first vertex in canonical order
        for (i, &v) in inside.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for e in &work.edges {
            if index[e.u] != usize::MAX && index[e.v] != usize::MAX {
                edges.push(Edge {
                    u: index[e.u],
                    v: index[e.v],
                    len: e.len.clone(),
                });
            }
        }
        let small = MetricTree::new(inside.len(), self.field, edges)?;
        let to_big = inside.iter().map(|&v| origin[v].clone()).collect();
        Ok(Embedding {
            small,
            to_big,
            image: s.clone(),
        })
    }
}

/// A tree `small` isometrically embedded in a larger tree as the subtree `image`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: MetricTree,
    /// Big-tree point of each small-tree vertex.
    pub to_big: Vec<TreePoint>,
    pub image: Subtree,
}

impl Embedding {
    /// Maps a point of the small tree into the big tree.
    pub fn embed(&self, big: &MetricTree, p: &TreePoint) -> TreePoint {
        let l = self.small.loc(p);
        if l.s.is_zero() {
            return self.to_big[l.c].clone();
        }
        let a = &self.to_big[l.c];
        let b = &self.to_big[self.small.parent[l.c]];
        big.at(a, b, &l.s)
    }

    /// Maps a big-tree point back, if it lies in the image.
    pub fn restrict(&self, big: &MetricTree, p: &TreePoint) -> Option<TreePoint> {
        if !big.contains(&self.image, p) {
            return None;
        }
        for (c, b) in self.to_big.iter().enumerate() {
            if b == p {
                return Some(TreePoint::Vertex(c));
            }
        }
        for c in 0..self.small.vertex_count() {
            if self.small.up[c].is_none() {
                continue;
            }
            let a = &self.to_big[c];
            let b = &self.to_big[self.small.parent[c]];
            if big.on_arc(a, b, p) {
                let s = big.dist(a, p);
                return Some(self.small.point(&Loc { c, s }));
            }
        }
        None
    }

    pub fn embed_subtree(&self, big: &MetricTree, s: &Subtree) -> Subtree {
        let pts: Vec<TreePoint> = s.ext.iter().map(|p| self.embed(big, p)).collect();
        big.hull_of(&pts)
    }

    /// Restricts a big-tree subtree contained in the image.
    pub fn restrict_subtree(&self, big: &MetricTree, s: &Subtree) -> Option<Subtree> {
        let pts = s
            .ext
            .iter()
            .map(|p| self.restrict(big, p))
            .collect::<Option<Vec<_>>>()?;
        Some(self.small.hull_of(&pts))
    }
}
