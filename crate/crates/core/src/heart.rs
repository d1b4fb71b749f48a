//! Finite-depth `Q_K`, limit sets, hearts and the audit of a candidate subtree.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lamination::{dual_membership_with, laminary_closure, unit_cylinder_leaves, GapOracle, LeafPair};
use crate::scalar::Scalar;
use crate::suspension::BallTree;
use crate::system::{IsometrySystem, PrefixStatus};
use crate::tree::{Subtree, TreePoint};
use crate::words::{enumerate_reduced, InfiniteWord, Word};

/// One convergent `Q_i` of a non-eventually-admissible word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    /// Host point of the chain ball.
    pub point: TreePoint,
    /// The copy and `K` coordinate of `point`.
    pub copy: (Word, TreePoint),
    /// `d(Q, Q_i)`.
    pub distance: Scalar,
}

#[derive(Clone, Debug)]
pub struct RayReport {
    pub depth: usize,
    /// Length of the first non-admissible prefix.
    pub dead_at: usize,
    pub ball: BallTree,
    /// Start of the bridge `[K, X_n K]`.
    pub q: TreePoint,
    pub convergents: Vec<Convergent>,
    /// `d(K, X_n K)`.
    pub gap: Scalar,
    /// Pairs `i < j` with `X_{[i+1, j]}` non-admissible, least `j` per `i`.
    pub certificates: Vec<(usize, usize)>,
    /// `[Q, Q_i] ⊆ [Q, Q_j]` for all `i < j`.
    pub nested: bool,
}

impl RayReport {
    pub fn distances(&self) -> Vec<Scalar> {
        self.convergents.iter().map(|c| c.distance.clone()).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.convergents.windows(2).all(|w| w[0].distance <= w[1].distance)
    }
}

#[derive(Clone, Debug)]
pub enum QkStatus {
    /// Every prefix up to the depth is admissible.
    Admissible { depth: usize, domain: Subtree, diameter: Scalar },
    /// No admissible tail found; `Q_K` lies outside `K`.
    Ray(Box<RayReport>),
    /// `X = X_i X'` with `X'` admissible to the remaining depth; `Q_K(X) = X_i Q_K(X')`.
    EventuallyAdmissible {
        split: usize,
        prefix: Word,
        tail_depth: usize,
        tail_domain: Subtree,
        tail_diameter: Scalar,
    },
}

impl QkStatus {
    pub fn label(&self) -> &'static str {
        match self {
            QkStatus::Admissible { .. } => "ADMISSIBLE",
            QkStatus::Ray(_) => "RAY",
            QkStatus::EventuallyAdmissible { .. } => "EVENTUALLY_ADMISSIBLE",
        }
    }
}

/// Evaluates `Q_K(X)` at depth `n`.
///
/// Split indices `i ≤ n/2` are tried for an admissible tail, so every tail
/// tested has depth at least `n/2`.
pub fn qk_eval(sys: &IsometrySystem, x: &InfiniteWord, n: usize, budget: Option<u64>) -> Result<QkStatus> {
    let d = sys.infinite_dom(x, n)?;
    let dead_at = match d.status {
        PrefixStatus::Alive => {
            return Ok(QkStatus::Admissible {
                depth: n,
                domain: d.domain,
                diameter: d.diameter,
            })
        }
        PrefixStatus::Dead(i) => i,
    };
    let mut tail = x.clone();
    for i in 1..=n / 2 {
        tail = tail.tail();
        let td = sys.infinite_dom(&tail, n - i)?;
        if td.status == PrefixStatus::Alive {
            return Ok(QkStatus::EventuallyAdmissible {
                split: i,
                prefix: x.prefix(i)?,
                tail_depth: n - i,
                tail_domain: td.domain,
                tail_diameter: td.diameter,
            });
        }
    }
    let w = x.prefix(n)?;
    if let Some(b) = budget {
        if (n as u64 + 1) > b {
            return Err(Error::resource("chain ball copies", n as u64 + 1, b));
        }
    }
    let ball = BallTree::chain(sys, &w)?;
    let host = ball.host();
    let base = ball.copy(&Word::empty())?;
    let far = ball.copy(&w)?;
    let bridge = host.bridge(&base, &far)?;
    let q = bridge.start.clone();
    let mut convergents = Vec::with_capacity(n);
    for i in 1..=n {
        let c = ball.copy(&w.prefix(i))?;
        let p = host.project(&c, &q)?;
        let copy = ball.unlocate(&p)?;
        convergents.push(Convergent {
            index: i,
            distance: host.distance(&q, &p)?,
            point: p,
            copy,
        });
    }
    let mut nested = true;
    for (i, a) in convergents.iter().enumerate() {
        for b in &convergents[i + 1..] {
            if host.distance(&q, &a.point)? + host.distance(&a.point, &b.point)? != b.distance {
                nested = false;
            }
        }
    }
    let mut certificates = Vec::new();
    for i in 0..n {
        if let Some(j) = (i + 1..=n).find(|&j| !sys.is_admissible(&w.subword(i, j))) {
            certificates.push((i, j));
        }
    }
    Ok(QkStatus::Ray(Box::new(RayReport {
        depth: n,
        dead_at,
        q,
        convergents,
        gap: bridge.length,
        certificates,
        nested,
        ball,
    })))
}

/// The depth-`n` outer approximation of the limit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSet {
    pub depth: usize,
    pub leaves: usize,
    /// Distinct sets `dom(P) ∩ dom(S)`, sorted.
    pub pieces: Vec<Subtree>,
}

pub fn limit_set_from_leaves(depth: usize, leaves: &[LeafPair]) -> LimitSet {
    let pieces: BTreeSet<Subtree> = leaves.iter().map(|l| l.domain.clone()).collect();
    LimitSet {
        depth,
        leaves: leaves.len(),
        pieces: pieces.into_iter().collect(),
    }
}

pub fn limit_set_approx(sys: &IsometrySystem, n: usize) -> Result<LimitSet> {
    let leaves = unit_cylinder_leaves(sys, n)?;
    Ok(limit_set_from_leaves(n, &leaves))
}

impl LimitSet {
    /// Each piece of `self` lies in some piece of `coarser`.
    pub fn refines(&self, sys: &IsometrySystem, coarser: &LimitSet) -> bool {
        let t = sys.tree();
        self.pieces
            .iter()
            .all(|p| coarser.pieces.iter().any(|q| t.is_subset(p, q)))
    }

    pub fn hull(&self, sys: &IsometrySystem) -> Subtree {
        let pts: Vec<TreePoint> = self.pieces.iter().flat_map(|p| p.extremals().iter().cloned()).collect();
        sys.tree().convex_hull(&pts).expect("pieces are points of K")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heart {
    pub depth: usize,
    pub hull: Subtree,
    /// Set when the limit set approximation is empty.
    pub empty: bool,
}

/// Convex hull of the depth-`n` limit set pieces.
pub fn heart_approx(sys: &IsometrySystem, n: usize) -> Result<Heart> {
    let ls = limit_set_approx(sys, n)?;
    let hull = ls.hull(sys);
    Ok(Heart {
        depth: n,
        empty: hull.is_empty(),
        hull,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check<W> {
    Holds,
    Fails(W),
    NotApplicable(String),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Check::Fails(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Check::Holds => "holds",
            Check::Fails(_) => "fails",
            Check::NotApplicable(_) => "n/a",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthRow {
    pub word: Word,
    pub host: Scalar,
    pub sub: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub n: usize,
    pub k: usize,
    pub search_len: usize,
    pub epsilon: Scalar,
    pub empty_generators: Vec<String>,
    /// A depth-`n` limit piece missing `K′`.
    pub cond3: Check<Subtree>,
    /// A host dual word outside the laminary closure of the `K′` system.
    pub cond2: Check<Word>,
    /// `‖w‖` on the host and on the `K′` side, one row per rotation class.
    pub lengths: Option<Vec<LengthRow>>,
    /// Conditions that disagree with each other.
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn lengths_equal(&self) -> Option<bool> {
        self.lengths.as_ref().map(|rows| rows.iter().all(|r| r.host == r.sub))
    }
}

/// Half the smallest `d(K, wK)` over non-admissible `|w| ≤ 4`, or half the
/// diameter of `K` (or 1) when every such word is admissible.
pub fn default_epsilon(sys: &IsometrySystem) -> Result<Scalar> {
    if let Some((_, g)) = crate::lamination::min_bridge_gap(sys, 4)? {
        return Ok(g.half());
    }
    let d = sys.tree().diameter_of_tree();
    Ok(if d.is_positive() { d.half() } else { Scalar::one() })
}

/// Rotation-class representatives of cyclically reduced words, `1 ≤ |w| ≤ n`.
pub fn cyclic_classes(rank: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 1..=n {
        for w in enumerate_reduced(rank, len) {
            if w.is_cyclically_reduced() && w.rotations().iter().all(|r| &w <= r) {
                out.push(w);
            }
        }
    }
    out
}

/// Compares `K` with a subtree `K′ ⊆ K` through finite-depth forms of the
/// limit-set, lamination and translation-length conditions.
pub fn theorem_audit(
    sys: &IsometrySystem,
    kprime: &Subtree,
    n: usize,
    k: usize,
    search_len: usize,
) -> Result<AuditReport> {
    let t = sys.tree();
    t.check_subtree(kprime)?;
    if kprime.is_empty() || !t.is_subset(kprime, sys.whole()) {
        return Err(Error::input("K′ must be a nonempty subtree of K"));
    }
    if search_len < n {
        return Err(Error::input("search length is shorter than n"));
    }
    // COND3 needs only the host; the other checks need every induced generator
    let empty_generators = sys.empty_on(kprime);
    let epsilon = default_epsilon(sys)?;

    let ls = limit_set_approx(sys, n)?;
    let cond3 = match ls.pieces.iter().find(|p| t.meet_subtrees(p, kprime).is_empty()) {
        Some(p) => Check::Fails(p.clone()),
        None => Check::Holds,
    };

    let (cond2, lengths) = if empty_generators.is_empty() {
        let induced = sys.induced(kprime)?;
        let sub = &induced.system;
        let closure = laminary_closure(sub, n, k, false, None)?;
        let mut oracle = GapOracle::new(sys);
        let mut cond2 = Check::Holds;
        'words: for len in 1..=n {
            for v in enumerate_reduced(sys.rank(), len) {
                if !oracle.is_admissible(&v) {
                    continue;
                }
                if dual_membership_with(&mut oracle, &v, &epsilon, search_len)?.is_yes() && !closure.contains(&v) {
                    cond2 = Check::Fails(v);
                    break 'words;
                }
            }
        }
        let mut sub_oracle = GapOracle::new(sub);
        let mut rows = Vec::new();
        for w in cyclic_classes(sys.rank(), n) {
            rows.push(LengthRow {
                host: oracle.translation_length(&w)?,
                sub: sub_oracle.translation_length(&w)?,
                word: w,
            });
        }
        (cond2, Some(rows))
    } else {
        let why = alloc::format!("induced generators empty on K′: {}", empty_generators.join(", "));
        (Check::NotApplicable(why), None)
    };

    let mut violations = Vec::new();
    if (cond2.holds() && cond3.fails()) || (cond2.fails() && cond3.holds()) {
        violations.push("COND2 and COND3 disagree".to_string());
    }
    if let Some(rows) = &lengths {
        let equal = rows.iter().all(|r| r.host == r.sub);
        if equal != cond3.holds() {
            violations.push("length comparison and COND3 disagree".to_string());
        }
    }
    Ok(AuditReport {
        n,
        k,
        search_len,
        epsilon,
        empty_generators,
        cond3,
        cond2,
        lengths,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub depth: usize,
    pub extremal_points: usize,
    pub branch_points: usize,
    pub empty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricProbe {
    pub rows: Vec<ProbeRow>,
    /// Least depth after which the counts stay fixed.
    pub stable_from: usize,
}

impl GeometricProbe {
    /// At least the last two depths agree.
    pub fn stabilizes(&self) -> bool {
        self.rows.last().is_some_and(|r| self.stable_from < r.depth)
    }
}

pub fn geometric_probe(sys: &IsometrySystem, n: usize) -> Result<GeometricProbe> {
    if n == 0 {
        return Err(Error::input("depth must be at least 1"));
    }
    let t = sys.tree();
    let mut rows = Vec::with_capacity(n);
    for m in 1..=n {
        let h = heart_approx(sys, m)?;
        rows.push(ProbeRow {
            depth: m,
            extremal_points: h.hull.extremals().len(),
            branch_points: t.branch_points_of(&h.hull).len(),
            empty: h.empty,
        });
    }
    let key = |r: &ProbeRow| (r.extremal_points, r.branch_points, r.empty);
    let last = key(rows.last().expect("n ≥ 1"));
    let stable_from = rows
        .iter()
        .rposition(|r| key(r) != last)
        .map_or(1, |i| rows[i + 1].depth);
    Ok(GeometricProbe { rows, stable_from })
}
