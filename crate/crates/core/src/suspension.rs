//! Finite pieces of the suspension tree `T_K = F_N × K / ∼`.
//!
//! A [`BallTree`] holds one copy of `K` for each word of a prefix-closed set,
//! glued to its parent copy along the domain of the last letter. Copies are
//! added one at a time as a pushout of finite trees: the part of `K` inside
//! `image(z)` is identified with existing host points, the rest is hung off
//! as new edges.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::IsometrySystem;
use crate::tree::{Bridge, MetricTree, Subtree, TreePoint, VertexId};
use crate::words::{count_reduced, enumerate_reduced, Letter, Word};

#[derive(Clone, Debug)]
enum Slot {
    /// Identified with `φ_parent(x)` for this point `x` of `K`.
    Glued(TreePoint),
    /// A new vertex hanging below an earlier slot.
    Free { attach: usize, len: Scalar },
}

/// How to glue a copy of `K` onto its parent along one letter.
#[derive(Clone, Debug)]
struct Template {
    /// Slot of each vertex of `K`.
    kslot: Vec<usize>,
    /// Slots in an order where every `Free` attaches to an earlier slot.
    slots: Vec<Slot>,
}

impl Template {
    fn new(sys: &IsometrySystem, z: Letter) -> Self {
        let k = sys.tree();
        let img = sys.letter_map(z).image();
        let back = sys.letter_map(z.inverse());
        let mut refined = k.clone();
        let mut origin: Vec<TreePoint> = (0..k.vertex_count()).map(TreePoint::Vertex).collect();
        let mut ext = Vec::new();
        for p in img.extremals() {
            let before = refined.vertex_count();
            let c = k.child_vertex(p);
            let s = k.dist(&TreePoint::Vertex(c), p);
            let v = refined.split_above(c, &s);
            if v >= before {
                origin.push(p.clone());
            }
            ext.push(TreePoint::Vertex(v));
        }
        let rimg = refined.hull_of(&ext);
        let n = refined.vertex_count();
        let mut order: Vec<Option<usize>> = vec![None; n];
        let mut slots = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for v in 0..n {
            if refined.contains(&rimg, &TreePoint::Vertex(v)) {
                order[v] = Some(slots.len());
                slots.push(Slot::Glued(back.apply_inside(k, &origin[v])));
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for e in refined.edges() {
                let w = if e.u == v {
                    e.v
                } else if e.v == v {
                    e.u
                } else {
                    continue;
                };
                if order[w].is_some() {
                    continue;
                }
                order[w] = Some(slots.len());
                slots.push(Slot::Free {
                    attach: order[v].expect("visited"),
                    len: e.len.clone(),
                });
                queue.push_back(w);
            }
        }
        let kslot = (0..k.vertex_count())
            .map(|v| order[v].expect("refined tree is connected"))
            .collect();
        Template { kslot, slots }
    }
}

/// The union of the translates `uK` over a prefix-closed set of words, as one tree.
#[derive(Clone, Debug)]
pub struct BallTree {
    sys: IsometrySystem,
    host: MetricTree,
    radius: Option<usize>,
    words: Vec<Word>,
    index: BTreeMap<Word, usize>,
    /// Host vertex of each vertex of `K`, per copy.
    phi: Vec<Vec<VertexId>>,
    /// A copy containing the host vertex and the edge above it.
    owner: Vec<usize>,
}

/// Number of copies in a ball of radius `r` for rank `n`.
pub fn ball_size(rank: usize, r: usize) -> u128 {
    (0..=r).map(|k| count_reduced(rank, k)).sum()
}

impl BallTree {
    /// All reduced words of length at most `r`.
    pub fn build(sys: &IsometrySystem, r: usize, budget: Option<u64>) -> Result<Self> {
        let needed = ball_size(sys.rank(), r);
        if let Some(b) = budget {
            if needed > b as u128 {
                return Err(Error::resource(
                    alloc::format!("ball of radius {r}"),
                    needed.min(u64::MAX as u128) as u64,
                    b,
                ));
            }
        }
        let mut words = Vec::new();
        for n in 0..=r {
            words.extend(enumerate_reduced(sys.rank(), n));
        }
        let mut ball = Self::build_sorted(sys, words)?;
        ball.radius = Some(r);
        Ok(ball)
    }

    /// The prefix closure of `words`.
    pub fn build_words(sys: &IsometrySystem, words: &[Word], budget: Option<u64>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for w in words {
            sys.check_word(w)?;
            for k in 0..=w.len() {
                set.insert(w.prefix(k));
            }
        }
        if let Some(b) = budget {
            if set.len() as u64 > b {
                return Err(Error::resource("copies", set.len() as u64, b));
            }
        }
        let mut list: Vec<Word> = set.into_iter().collect();
        list.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Self::build_sorted(sys, list)
    }

    /// The copies `w_k K` for the prefixes `w_k` of one word.
    pub fn chain(sys: &IsometrySystem, w: &Word) -> Result<Self> {
        Self::build_words(sys, core::slice::from_ref(w), None)
    }

    fn build_sorted(sys: &IsometrySystem, words: Vec<Word>) -> Result<Self> {
        for g in sys.generators() {
            if g.domain().is_empty() {
                return Err(Error::input(alloc::format!("generator '{}' is empty", g.name)));
            }
        }
        let k = sys.tree();
        let templates: Vec<Template> = (0..2 * sys.rank() as u8)
            .map(|c| Template::new(sys, Letter::from_code(c)))
            .collect();
        let mut ball = BallTree {
            sys: sys.clone(),
            host: k.clone(),
            radius: None,
            words: Vec::with_capacity(words.len()),
            index: BTreeMap::new(),
            phi: Vec::with_capacity(words.len()),
            owner: vec![0; k.vertex_count()],
        };
        for w in words {
            if ball.index.contains_key(&w) {
                continue;
            }
            if w.is_empty() {
                ball.push_copy(w, (0..k.vertex_count()).collect());
                continue;
            }
            let parent = w.prefix(w.len() - 1);
            let z = w.last().expect("nonempty");
            let pidx = *ball
                .index
                .get(&parent)
                .ok_or_else(|| Error::invariant("words are not prefix-closed"))?;
            let idx = ball.words.len();
            let tpl = &templates[z.code() as usize];
            let mut hv: Vec<VertexId> = Vec::with_capacity(tpl.slots.len());
            for slot in &tpl.slots {
                let v = match slot {
                    Slot::Glued(x) => {
                        let p = ball.locate_idx(pidx, x);
                        ball.split(&p)
                    }
                    Slot::Free { attach, len } => {
                        let v = ball.host.add_leaf(hv[*attach], len.clone());
                        ball.owner.push(idx);
                        v
                    }
                };
                hv.push(v);
            }
            let phi = tpl.kslot.iter().map(|&s| hv[s]).collect();
            ball.push_copy(w, phi);
        }
        if ball.words.first().is_none_or(|w| !w.is_empty()) {
            return Err(Error::invariant("ball without a base copy"));
        }
        Ok(ball)
    }

    fn push_copy(&mut self, w: Word, phi: Vec<VertexId>) {
        self.index.insert(w.clone(), self.words.len());
        self.words.push(w);
        self.phi.push(phi);
    }

    fn split(&mut self, p: &TreePoint) -> VertexId {
        let before = self.host.vertex_count();
        let c = self.host.child_vertex(p);
        let v = self.host.split_at(p);
        if v >= before {
            let o = self.owner[c];
            self.owner.push(o);
        }
        v
    }

    pub fn system(&self) -> &IsometrySystem {
        &self.sys
    }

    pub fn host(&self) -> &MetricTree {
        &self.host
    }

    /// The radius when built as a full ball.
    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn copy_count(&self) -> usize {
        self.words.len()
    }

    pub fn contains_word(&self, u: &Word) -> bool {
        self.index.contains_key(u)
    }

    fn idx(&self, u: &Word) -> Result<usize> {
        self.index
            .get(u)
            .copied()
            .ok_or_else(|| Error::out_of_ball(alloc::format!("word {u} has no copy in this ball")))
    }

    fn locate_idx(&self, i: usize, x: &TreePoint) -> TreePoint {
        let k = self.sys.tree();
        let c = k.child_vertex(x);
        let phi = &self.phi[i];
        match k.parent(c) {
            Some(p) if !matches!(x, TreePoint::Vertex(_)) => {
                let s = k.dist(&TreePoint::Vertex(c), x);
                self.host
                    .at(&TreePoint::Vertex(phi[c]), &TreePoint::Vertex(phi[p]), &s)
            }
            _ => TreePoint::Vertex(phi[c]),
        }
    }

    /// Host vertices of the copy `uK`, one per vertex of `K`.
    pub fn embedding(&self, u: &Word) -> Result<Vec<TreePoint>> {
        let i = self.idx(u)?;
        Ok(self.phi[i].iter().map(|&v| TreePoint::Vertex(v)).collect())
    }

    /// The host point of the class of `(u, x)`.
    pub fn locate(&self, u: &Word, x: &TreePoint) -> Result<TreePoint> {
        self.sys.tree().check_point(x)?;
        let i = self.idx(u)?;
        Ok(self.locate_idx(i, x))
    }

    /// `uK` as a host subtree.
    pub fn copy(&self, u: &Word) -> Result<Subtree> {
        let i = self.idx(u)?;
        Ok(self.copy_idx(i))
    }

    fn copy_idx(&self, i: usize) -> Subtree {
        let k = self.sys.tree();
        let pts: Vec<TreePoint> = k
            .leaves()
            .into_iter()
            .map(|v| TreePoint::Vertex(self.phi[i][v]))
            .collect();
        self.host.hull_of(&pts)
    }

    /// The point of `K` that copy `i` places at host point `p`, if any.
    fn pull_point(&self, i: usize, p: &TreePoint) -> Option<TreePoint> {
        let k = self.sys.tree();
        let phi = &self.phi[i];
        if k.vertex_count() == 1 {
            return (TreePoint::Vertex(phi[0]) == *p).then_some(TreePoint::Vertex(0));
        }
        for e in k.edges() {
            let (a, b) = (TreePoint::Vertex(phi[e.u]), TreePoint::Vertex(phi[e.v]));
            if self.host.on_arc(&a, &b, p) {
                let d = self.host.dist(&a, p);
                return Some(k.at(&TreePoint::Vertex(e.u), &TreePoint::Vertex(e.v), &d));
            }
        }
        None
    }

    /// A pair `(u, x)` whose class is `p`.
    pub fn unlocate(&self, p: &TreePoint) -> Result<(Word, TreePoint)> {
        self.host.check_point(p)?;
        let o = self.owner[self.host.child_vertex(p)];
        if let Some(x) = self.pull_point(o, p) {
            return Ok((self.words[o].clone(), x));
        }
        self.copies_containing(p)
            .into_iter()
            .next()
            .ok_or_else(|| Error::invariant("host point lies in no copy"))
    }

    /// Every `(u, x)` in the ball whose class is `p`.
    pub fn copies_containing(&self, p: &TreePoint) -> Vec<(Word, TreePoint)> {
        (0..self.words.len())
            .filter_map(|i| self.pull_point(i, p).map(|x| (self.words[i].clone(), x)))
            .collect()
    }

    /// A host subtree inside `uK`, expressed in the coordinates of `K`.
    pub fn pull_back(&self, u: &Word, s: &Subtree) -> Result<Subtree> {
        let i = self.idx(u)?;
        let pts = s
            .extremals()
            .iter()
            .map(|p| self.pull_point(i, p))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::input("subtree is not inside the copy"))?;
        Ok(self.sys.tree().hull_of(&pts))
    }

    /// The left action `w · (u, x) = (wu, x)`.
    pub fn act(&self, w: &Word, p: &TreePoint) -> Result<TreePoint> {
        self.sys.check_word(w)?;
        let (u, x) = self.unlocate(p)?;
        let wu = w.mul(&u);
        if let Some(&i) = self.index.get(&wu) {
            return Ok(self.locate_idx(i, &x));
        }
        for (u, x) in self.copies_containing(p) {
            if let Some(&i) = self.index.get(&w.mul(&u)) {
                return Ok(self.locate_idx(i, &x));
            }
        }
        Err(Error::out_of_ball(alloc::format!(
            "translate of the point by {w} leaves the ball"
        )))
    }

    /// `⋂_k w_k K` over the prefixes of `w`, as a host subtree.
    pub fn prefix_intersection(&self, w: &Word) -> Result<Subtree> {
        let mut acc = self.copy(&Word::empty())?;
        for k in 1..=w.len() {
            let c = self.copy(&w.prefix(k))?;
            acc = self.host.meet_subtrees(&acc, &c);
        }
        Ok(acc)
    }

    /// The bridge `[K, wK]` alone.
    fn bridge_only(&self, w: &Word) -> Result<crate::tree::Bridge> {
        let base = self.copy(&Word::empty())?;
        let far = self.copy(w)?;
        Ok(self.host.bridge_unchecked(&base, &far))
    }

    /// The bridge `[K, wK]` for a non-admissible `w`, with the prefix copies it crosses.
    pub fn bridge_to_translate(&self, w: &Word) -> Result<BridgeCertificate> {
        if self.sys.is_admissible(w) {
            return Err(Error::input(alloc::format!("{w} is admissible; K and wK meet")));
        }
        let base = self.copy(&Word::empty())?;
        let far = self.copy(w)?;
        let bridge = self.host.bridge_unchecked(&base, &far);
        let seg = self.host.hull_of(&[bridge.start.clone(), bridge.end.clone()]);
        let mut hits = Vec::with_capacity(w.len() + 1);
        let mut parts = Vec::with_capacity(w.len() + 1);
        for k in 0..=w.len() {
            let c = self.copy(&w.prefix(k))?;
            let m = self.host.meet_subtrees(&seg, &c);
            hits.push((w.prefix(k), m.extremals().first().cloned()));
            parts.push(c);
        }
        let covered = self.host.arc_covered(&bridge.start, &bridge.end, &parts);
        Ok(BridgeCertificate {
            word: w.clone(),
            bridge,
            hits,
            covered,
        })
    }
}

/// The bridge between `K` and `wK` and the prefix translates along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeCertificate {
    pub word: Word,
    pub bridge: Bridge,
    /// For each prefix `w_k`, a host point of the bridge in `w_k K`.
    pub hits: Vec<(Word, Option<TreePoint>)>,
    /// True if the prefix translates cover the whole bridge.
    pub covered: bool,
}

impl BridgeCertificate {
    pub fn meets_every_prefix(&self) -> bool {
        self.hits.iter().all(|(_, h)| h.is_some())
    }
}

/// Bridge on the chain of prefix copies of `w`.
pub fn bridge_to_translate(sys: &IsometrySystem, w: &Word) -> Result<(BallTree, BridgeCertificate)> {
    let ball = BallTree::chain(sys, w)?;
    let cert = ball.bridge_to_translate(w)?;
    Ok((ball, cert))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryKind {
    /// `d(witness, w·witness) = ‖w‖`; `power` is the least `n` with `wⁿ` non-admissible.
    Hyperbolic { witness: TreePoint, power: usize },
    /// `witness · w = witness`.
    Elliptic { witness: TreePoint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationLength {
    pub length: Scalar,
    pub kind: IsometryKind,
}

impl TranslationLength {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.kind, IsometryKind::Hyperbolic { .. })
    }
}

/// `d(p, wp)` in `T_K` for `p ∈ K`, on the chain of `w`.
pub fn displacement(sys: &IsometrySystem, w: &Word, p: &TreePoint) -> Result<Scalar> {
    let ball = BallTree::chain(sys, w)?;
    let a = ball.locate(&Word::empty(), p)?;
    let b = ball.locate(w, p)?;
    Ok(ball.host().dist(&a, &b))
}

/// `d(K, wK)` in `T_K`.
pub fn translate_gap(sys: &IsometrySystem, w: &Word) -> Result<Scalar> {
    if sys.is_admissible(w) {
        return Ok(Scalar::zero());
    }
    Ok(BallTree::chain(sys, w)?.bridge_only(w)?.length)
}

const MAX_POWER: usize = 4096;

/// `‖w‖ = max(0, d(p, w²p) − d(p, wp))` with a witness in `K`.
pub fn translation_length(sys: &IsometrySystem, w: &Word) -> Result<TranslationLength> {
    sys.check_word(w)?;
    if w.is_empty() || !w.is_cyclically_reduced() {
        return Err(Error::input(alloc::format!(
            "{w} must be nonempty and cyclically reduced"
        )));
    }
    let k = sys.tree();
    let w2 = w.mul(w);
    let ball = BallTree::chain(sys, &w2)?;
    let p = TreePoint::Vertex(0);
    let base = ball.locate(&Word::empty(), &p)?;
    let d1 = ball.host().dist(&base, &ball.locate(w, &p)?);
    let d2 = ball.host().dist(&base, &ball.locate(&w2, &p)?);
    let diff = &d2 - &d1;
    if diff.is_positive() {
        let mut n = 1;
        let mut wn = w.clone();
        while sys.is_admissible(&wn) {
            n += 1;
            if n > MAX_POWER {
                return Err(Error::invariant(alloc::format!("{w} is hyperbolic but all powers are admissible")));
            }
            wn = wn.mul(w);
        }
        let chain = BallTree::chain(sys, &wn)?;
        let bridge = chain.bridge_only(&wn)?;
        let (u, x) = chain
            .copies_containing(&bridge.start)
            .into_iter()
            .find(|(u, _)| u.is_empty())
            .ok_or_else(|| Error::invariant("bridge start is not in K"))?;
        debug_assert!(u.is_empty());
        let wx = chain.locate(w, &x)?;
        let moved = chain.host().dist(&bridge.start, &wx);
        if moved != diff {
            return Err(Error::invariant(alloc::format!(
                "axis witness for {w} moves by {moved}, expected {diff}"
            )));
        }
        return Ok(TranslationLength {
            length: diff,
            kind: IsometryKind::Hyperbolic { witness: x, power: n },
        });
    }
    let m = sys.word_map(w);
    if m.is_empty() {
        return Err(Error::invariant(alloc::format!("{w} is elliptic but not admissible")));
    }
    let x = m.domain().extremals()[0].clone();
    let y = m.apply(k, &x).expect("x in domain");
    let mid = k.at(&x, &y, &k.dist(&x, &y).half());
    if m.apply(k, &mid).as_ref() != Some(&mid) {
        return Err(Error::invariant(alloc::format!("midpoint for {w} is not fixed")));
    }
    Ok(TranslationLength {
        length: Scalar::zero(),
        kind: IsometryKind::Elliptic { witness: mid },
    })
}

/// `‖w‖` for any word, by cyclic reduction first.
pub fn translation_length_any(sys: &IsometrySystem, w: &Word) -> Result<Scalar> {
    if w.is_empty() {
        return Ok(Scalar::zero());
    }
    let (_, c) = w.cyclic_reduce();
    Ok(translation_length(sys, &c)?.length)
}

/// The equivariant map from a ball of `T_{K′}` to a ball of `T_K` with `j(u, x) = (u, x)`.
#[derive(Clone, Debug)]
pub struct RestrictionMorphism {
    pub small: BallTree,
    pub big: BallTree,
    pub embedding: crate::tree::Embedding,
}

impl RestrictionMorphism {
    pub fn new(big: &IsometrySystem, kprime: &Subtree, r: usize, budget: Option<u64>) -> Result<Self> {
        let induced = big.induced(kprime)?;
        Ok(RestrictionMorphism {
            small: BallTree::build(&induced.system, r, budget)?,
            big: BallTree::build(big, r, budget)?,
            embedding: induced.embedding,
        })
    }

    /// Image of a host point of the small ball.
    pub fn apply(&self, p: &TreePoint) -> Result<TreePoint> {
        let (u, x) = self.small.unlocate(p)?;
        let xb = self.embedding.embed(self.big.system().tree(), &x);
        self.big.locate(&u, &xb)
    }

    /// Checks `d(j p, j q) ≤ d(p, q)` over all host vertex pairs of the small ball;
    /// returns whether some pair is strictly shortened.
    pub fn lipschitz_check(&self) -> Result<LipschitzReport> {
        let n = self.small.host().vertex_count();
        let imgs: Vec<TreePoint> = (0..n)
            .map(|v| self.apply(&TreePoint::Vertex(v)))
            .collect::<Result<_>>()?;
        let mut report = LipschitzReport {
            pairs: 0,
            expanding: None,
            strictly_shorter: None,
        };
        for a in 0..n {
            for b in a + 1..n {
                report.pairs += 1;
                let d0 = self.small.host().dist(&TreePoint::Vertex(a), &TreePoint::Vertex(b));
                let d1 = self.big.host().dist(&imgs[a], &imgs[b]);
                if d1 > d0 && report.expanding.is_none() {
                    report.expanding = Some((a, b));
                }
                if d1 < d0 && report.strictly_shorter.is_none() {
                    report.strictly_shorter = Some((a, b));
                }
            }
        }
        Ok(report)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzReport {
    pub pairs: usize,
    /// A vertex pair whose distance grows; never expected.
    pub expanding: Option<(VertexId, VertexId)>,
    /// A vertex pair whose distance strictly shrinks.
    pub strictly_shorter: Option<(VertexId, VertexId)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn w(sys: &IsometrySystem, s: &str) -> Word {
        sys.alphabet().parse_word(s).unwrap()
    }

    /// Signed position along a line host, with `φ_1(0)` at 0 and `φ_1(v1)` at `len`.
    fn coord(ball: &BallTree, p: &TreePoint) -> Scalar {
        let o = ball.locate(&Word::empty(), &TreePoint::Vertex(0)).unwrap();
        let e = ball.locate(&Word::empty(), &TreePoint::Vertex(1)).unwrap();
        let h = ball.host();
        let l = h.dist(&o, &e);
        let (a, b) = (h.dist(p, &o), h.dist(p, &e));
        (&a * &a - &b * &b + &l * &l) / (&l + &l)
    }

    #[test]
    fn base_ball_is_k() {
        for (_, s) in catalog::all() {
            let b = BallTree::build(&s, 0, None).unwrap();
            assert_eq!(b.host(), s.tree());
        }
    }

    #[test]
    fn shift_ball() {
        let s = catalog::sys_shift();
        let b = BallTree::build(&s, 1, None).unwrap();
        assert_eq!(b.host().diameter_of_tree(), Scalar::from_int(4));
        let two = b.locate(&w(&s, "a"), &TreePoint::Vertex(1)).unwrap();
        let one = b.locate(&Word::empty(), &catalog::at(s.tree(), 1, 1)).unwrap();
        assert_eq!(two, one);
        let g2 = b.locate(&Word::empty(), &TreePoint::Vertex(1)).unwrap();
        let moved = b.act(&w(&s, "a"), &g2).unwrap();
        assert_eq!(coord(&b, &moved), Scalar::one());
        assert_eq!(b.act(&Word::empty(), &g2).unwrap(), g2);
    }

    #[test]
    fn point_ball() {
        let s = catalog::sys_point();
        let b = BallTree::build(&s, 2, None).unwrap();
        assert_eq!(b.host().diameter_of_tree(), Scalar::from_int(5));
        let b1 = BallTree::build(&s, 1, None).unwrap();
        let a0 = b1.locate(&w(&s, "a"), &TreePoint::Vertex(0)).unwrap();
        assert_eq!(a0, b1.locate(&Word::empty(), &TreePoint::Vertex(1)).unwrap());
        let g0 = b1.locate(&Word::empty(), &TreePoint::Vertex(0)).unwrap();
        assert_eq!(coord(&b1, &b1.act(&w(&s, "a"), &g0).unwrap()), Scalar::one());
        assert!(b1.locate(&w(&s, "aa"), &TreePoint::Vertex(0)).is_err());
    }

    #[test]
    fn bridges() {
        let s = catalog::sys_shift();
        let (ball, c) = bridge_to_translate(&s, &w(&s, "aaa")).unwrap();
        assert_eq!(c.bridge.length, Scalar::one());
        assert_eq!(coord(&ball, &c.bridge.start), Scalar::zero());
        assert_eq!(coord(&ball, &c.bridge.end), Scalar::from_int(-1));
        assert!(c.covered && c.meets_every_prefix());

        let p = catalog::sys_point();
        let (_, c) = bridge_to_translate(&p, &w(&p, "aa")).unwrap();
        assert_eq!(c.bridge.length, Scalar::one());

        let g = catalog::sys_gold();
        let (_, c) = bridge_to_translate(&g, &w(&g, "aa")).unwrap();
        assert_eq!(c.bridge.length, Scalar::sqrt_of(5) - Scalar::from_int(2));
        assert!(bridge_to_translate(&g, &w(&g, "ab")).is_err());
    }

    #[test]
    fn lengths() {
        let s = catalog::sys_shift();
        let t = translation_length(&s, &w(&s, "a")).unwrap();
        assert_eq!(t.length, Scalar::one());
        assert!(t.is_hyperbolic());
        let r = catalog::sys_reflect();
        let t = translation_length(&r, &w(&r, "a")).unwrap();
        assert_eq!(t.length, Scalar::zero());
        assert_eq!(t.kind, IsometryKind::Elliptic { witness: catalog::at(r.tree(), 1, 1) });
        let g = catalog::sys_gold();
        let t = translation_length(&g, &w(&g, "ab")).unwrap();
        assert!(t.length.is_positive());
        assert!(translation_length(&g, &w(&g, "a.b.A")).is_err());
    }

    #[test]
    fn restriction_is_identity_on_whole() {
        let s = catalog::sys_gold();
        let m = RestrictionMorphism::new(&s, s.whole(), 2, None).unwrap();
        let r = m.lipschitz_check().unwrap();
        assert!(r.expanding.is_none());
        assert!(r.strictly_shorter.is_none());
    }
}
