//! Admissible words, the laminary closure, unit-cylinder leaves and the
//! dual language test.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::suspension::{translate_gap, translation_length};
use crate::system::IsometrySystem;
use crate::tree::Subtree;
use crate::words::{Letter, Word};

fn letters(sys: &IsometrySystem, positive_only: bool) -> Vec<Letter> {
    (0..2 * sys.rank() as u8)
        .map(Letter::from_code)
        .filter(|l| !positive_only || !l.is_inverse())
        .collect()
}

/// Depth-first walk over admissible words, tracking `image(w)`.
///
/// `visit` returns false to stop descending below a word.
fn walk_admissible(
    sys: &IsometrySystem,
    max_len: usize,
    positive_only: bool,
    visit: &mut dyn FnMut(&Word, &Subtree) -> bool,
) {
    let t = sys.tree();
    let alphabet = letters(sys, positive_only);
    let mut stack: Vec<(Word, Subtree)> = Vec::from([(Word::empty(), sys.whole().clone())]);
    while let Some((w, img)) = stack.pop() {
        if w.len() == max_len {
            continue;
        }
        for &l in alphabet.iter().rev() {
            if w.last() == Some(l.inverse()) {
                continue;
            }
            let m = sys.letter_map(l);
            let inside = t.meet_subtrees(&img, m.domain());
            if inside.is_empty() {
                continue;
            }
            let w2 = w.times(l);
            let img2 = m.map_subtree(t, &inside);
            if visit(&w2, &img2) {
                stack.push((w2, img2));
            }
        }
    }
}

fn length_lex(a: &Word, b: &Word) -> core::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Nonempty admissible words of length at most `n`, in length-lexicographic order.
pub fn admissible_words(sys: &IsometrySystem, n: usize, positive_only: bool) -> Vec<Word> {
    let mut out = Vec::new();
    walk_admissible(sys, n, positive_only, &mut |w, _| {
        out.push(w.clone());
        true
    });
    out.sort_by(length_lex);
    out
}

/// Number of admissible words of each length `0..=n`.
pub fn admissible_counts(sys: &IsometrySystem, n: usize, positive_only: bool) -> Vec<usize> {
    let mut counts = alloc::vec![0usize; n + 1];
    counts[0] = 1;
    walk_admissible(sys, n, positive_only, &mut |w, _| {
        counts[w.len()] += 1;
        true
    });
    counts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceEntry {
    pub word: Word,
    /// Survives chopping at the slice's `k`.
    pub survives: bool,
}

/// Admissible words up to length `n`, flagged by whether they lie in the
/// depth-`k` laminary closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarySlice {
    pub n: usize,
    pub k: usize,
    pub positive_only: bool,
    pub entries: Vec<SliceEntry>,
    /// Surviving word count at each depth `0..=k`; depth 0 is `Adm` itself.
    pub counts_by_k: Vec<usize>,
    /// The least depth from which the count no longer changes up to `k`.
    pub stable_from: usize,
}

impl LaminarySlice {
    pub fn words(&self) -> Vec<Word> {
        self.entries.iter().filter(|e| e.survives).map(|e| e.word.clone()).collect()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.entries.iter().any(|e| e.survives && &e.word == w)
    }

    pub fn is_stable(&self) -> bool {
        self.stable_from < self.k
    }
}

/// Keeps `w` with `1 ≤ |w| ≤ n` iff some admissible `v` of length `|w| + 2k` chops to `w`.
///
/// `budget` bounds the number of admissible words enumerated.
pub fn laminary_closure(
    sys: &IsometrySystem,
    n: usize,
    k: usize,
    positive_only: bool,
    budget: Option<u64>,
) -> Result<LaminarySlice> {
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    let mut by_len: Vec<Vec<Word>> = alloc::vec![Vec::new(); n + 2 * k + 1];
    let mut seen = 0u64;
    walk_admissible(sys, n + 2 * k, positive_only, &mut |w, _| {
        seen += 1;
        if budget.is_none_or(|b| seen <= b) {
            by_len[w.len()].push(w.clone());
        }
        true
    });
    if let Some(b) = budget {
        if seen > b {
            return Err(Error::resource(
                alloc::format!("laminary closure at n={n}, k={k}"),
                seen,
                b,
            ));
        }
    }
    let mut adm: Vec<Word> = by_len[1..=n].iter().flatten().cloned().collect();
    adm.sort_by(length_lex);
    let survivors_at = |j: usize| -> BTreeSet<Word> {
        let mut s = BTreeSet::new();
        for layer in &by_len[1 + 2 * j..=n + 2 * j] {
            for v in layer {
                s.insert(v.chop(j).expect("long enough"));
            }
        }
        s
    };
    let mut counts_by_k = Vec::with_capacity(k + 1);
    let mut last = BTreeSet::new();
    for j in 0..=k {
        last = survivors_at(j);
        counts_by_k.push(last.len());
    }
    let final_count = counts_by_k[k];
    let stable_from = (0..=k)
        .find(|&j| counts_by_k[j..].iter().all(|&c| c == final_count))
        .unwrap_or(k);
    let entries = adm
        .into_iter()
        .map(|w| SliceEntry {
            survives: last.contains(&w),
            word: w,
        })
        .collect();
    Ok(LaminarySlice {
        n,
        k,
        positive_only,
        entries,
        counts_by_k,
        stable_from,
    })
}

/// A finite-depth leaf `(X, Y)` of the unit cylinder, `X₁ < Y₁`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LeafPair {
    pub x: Word,
    pub y: Word,
    /// `dom(X) ∩ dom(Y)`, never empty.
    pub domain: Subtree,
}

impl LeafPair {
    pub fn flip(&self) -> LeafPair {
        LeafPair {
            x: self.y.clone(),
            y: self.x.clone(),
            domain: self.domain.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.x.first() < self.y.first()
    }
}

/// Admissible words of length exactly `n` with their domains.
pub fn admissible_with_domains(sys: &IsometrySystem, n: usize) -> Vec<(Word, Subtree)> {
    let mut words = Vec::new();
    walk_admissible(sys, n, false, &mut |w, _| {
        if w.len() == n {
            words.push(w.clone());
        }
        true
    });
    words.sort();
    words.into_iter().map(|w| {
        let d = sys.dom(&w);
        (w, d)
    }).collect()
}

/// Pairs of admissible words of length `n` with distinct first letters and
/// intersecting domains, in canonical orientation.
pub fn unit_cylinder_leaves(sys: &IsometrySystem, n: usize) -> Result<Vec<LeafPair>> {
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    let t = sys.tree();
    let words = admissible_with_domains(sys, n);
    let mut out = Vec::new();
    for (i, (p, dp)) in words.iter().enumerate() {
        for (s, ds) in &words[i + 1..] {
            if p.first() >= s.first() {
                continue;
            }
            let d = t.meet_subtrees(dp, ds);
            if !d.is_empty() {
                out.push(LeafPair {
                    x: p.clone(),
                    y: s.clone(),
                    domain: d,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Memoised `d(K, sK)` and translation lengths, shared across searches.
#[derive(Clone, Debug)]
pub struct GapOracle<'a> {
    sys: &'a IsometrySystem,
    memo: BTreeMap<Word, Scalar>,
    lengths: BTreeMap<Word, Scalar>,
    admissible: BTreeMap<Word, bool>,
}

impl<'a> GapOracle<'a> {
    pub fn new(sys: &'a IsometrySystem) -> Self {
        GapOracle {
            sys,
            memo: BTreeMap::new(),
            lengths: BTreeMap::new(),
            admissible: BTreeMap::new(),
        }
    }

    pub fn is_admissible(&mut self, s: &Word) -> bool {
        if let Some(&a) = self.admissible.get(s) {
            return a;
        }
        let a = self.sys.is_admissible(s);
        self.admissible.insert(s.clone(), a);
        a
    }

    /// True when `s` is non-admissible with `d(K, sK) ≥ eps`.
    fn blocks(&mut self, s: &Word, eps: &Scalar) -> Result<bool> {
        Ok(!self.is_admissible(s) && &self.gap(s)? >= eps)
    }

    /// `‖c‖` for a nonempty cyclically reduced word, keyed by its least rotation.
    pub fn translation_length(&mut self, c: &Word) -> Result<Scalar> {
        let key = c.rotations().into_iter().min().expect("nonempty");
        if let Some(l) = self.lengths.get(&key) {
            return Ok(l.clone());
        }
        let l = translation_length(self.sys, c)?.length;
        self.lengths.insert(key, l.clone());
        Ok(l)
    }

    pub fn gap(&mut self, s: &Word) -> Result<Scalar> {
        if let Some(g) = self.memo.get(s) {
            return Ok(g.clone());
        }
        let g = translate_gap(self.sys, s)?;
        self.memo.insert(s.clone(), g.clone());
        Ok(g)
    }
}

/// The smallest positive `d(K, wK)` over non-admissible `w` with `|w| ≤ max_len`.
pub fn min_bridge_gap(sys: &IsometrySystem, max_len: usize) -> Result<Option<(Word, Scalar)>> {
    let mut oracle = GapOracle::new(sys);
    let mut best: Option<(Word, Scalar)> = None;
    for n in 1..=max_len {
        for w in crate::words::enumerate_reduced(sys.rank(), n) {
            if sys.is_admissible(&w) {
                continue;
            }
            let g = oracle.gap(&w)?;
            if best.as_ref().is_none_or(|(_, b)| &g < b) {
                best = Some((w, g));
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualMembership {
    /// `‖u·v·w‖ < ε` with the product reduced and cyclically reduced.
    Yes { u: Word, w: Word, length: Scalar },
    /// Nothing found within the search length; not a proof of absence.
    NoWitness { candidates: usize },
}

impl DualMembership {
    pub fn is_yes(&self) -> bool {
        matches!(self, DualMembership::Yes { .. })
    }
}

const PRUNE_WINDOW: usize = 6;

/// Checks every subword of `c` ending at position `end` (exclusive) against the gap bound.
fn blocked_linear(oracle: &mut GapOracle<'_>, c: &Word, eps: &Scalar, new_at_end: bool) -> Result<bool> {
    let n = c.len();
    for len in 2..=PRUNE_WINDOW.min(n) {
        let s = if new_at_end { c.subword(n - len, n) } else { c.subword(0, len) };
        if oracle.blocks(&s, eps)? {
            return Ok(true);
        }
    }
    let s = if new_at_end { c.subword(n - 1, n) } else { c.subword(0, 1) };
    oracle.blocks(&s, eps)
}

fn blocked_cyclic(oracle: &mut GapOracle<'_>, c: &Word, eps: &Scalar) -> Result<bool> {
    let n = c.len();
    let doubled: Vec<Letter> = c.letters().iter().chain(c.letters()).copied().collect();
    for len in 1..=PRUNE_WINDOW.min(n) {
        for i in 0..n {
            if i + len <= n {
                continue;
            }
            let s = Word::from_reduced(doubled[i..i + len].to_vec())?;
            if oracle.blocks(&s, eps)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Searches `u, w` with `|u·v·w| ≤ search_len` and `‖u·v·w‖ < ε`, shortest first.
///
/// Candidates containing a non-admissible subword `s` (up to six letters,
/// read cyclically) with `d(K, sK) ≥ ε` are skipped, since `d(K, sK)` bounds
/// the translation length of any cyclic word containing `s` from below.
pub fn dual_membership(sys: &IsometrySystem, v: &Word, eps: &Scalar, search_len: usize) -> Result<DualMembership> {
    dual_membership_with(&mut GapOracle::new(sys), v, eps, search_len)
}

/// [`dual_membership`] reusing the memo tables of `oracle`.
pub fn dual_membership_with(
    oracle: &mut GapOracle<'_>,
    v: &Word,
    eps: &Scalar,
    search_len: usize,
) -> Result<DualMembership> {
    let sys = oracle.sys;
    sys.check_word(v)?;
    if search_len < v.len() {
        return Err(Error::input("search length is shorter than the word"));
    }
    if !eps.is_positive() {
        return Err(Error::input("ε must be positive"));
    }
    let all = letters(sys, false);
    let mut candidates = 0usize;
    for i in 0..v.len() {
        for j in i + 1..=v.len().min(i + PRUNE_WINDOW) {
            let sub = v.subword(i, j);
            if oracle.blocks(&sub, eps)? {
                return Ok(DualMembership::NoWitness { candidates });
            }
        }
    }
    // each (u, w) is reached once: grow u while w is empty, then grow w
    let mut level: Vec<(Word, Word)> = Vec::from([(Word::empty(), Word::empty())]);
    for total in v.len()..=search_len {
        level.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (u, w) in &level {
            let c = u.mul(v).mul(w);
            if c.is_empty() || !c.is_cyclically_reduced() {
                continue;
            }
            candidates += 1;
            if blocked_cyclic(oracle, &c, eps)? {
                continue;
            }
            let length = oracle.translation_length(&c)?;
            if &length < eps {
                return Ok(DualMembership::Yes {
                    u: u.clone(),
                    w: w.clone(),
                    length,
                });
            }
        }
        if total == search_len {
            break;
        }
        let mut next = Vec::new();
        for (u, w) in &level {
            for &l in &all {
                if w.is_empty() {
                    let u2 = Word::letter(l).mul(u);
                    if u2.len() == u.len() + 1 && v.first().is_none_or(|f| f != l.inverse() || !u.is_empty()) {
                        let c = u2.mul(v);
                        if c.len() == u2.len() + v.len() && !blocked_linear(oracle, &c, eps, false)? {
                            next.push((u2, w.clone()));
                        }
                    }
                }
                let w2 = w.times(l);
                if w2.len() == w.len() + 1 {
                    let c = u.mul(v).mul(&w2);
                    if c.len() == u.len() + v.len() + w2.len() && !blocked_linear(oracle, &c, eps, true)? {
                        next.push((u.clone(), w2));
                    }
                }
            }
        }
        level = next;
    }
    Ok(DualMembership::NoWitness { candidates })
}

/// Chained leaves `(P, S)`, `(S, R)` whose diagonal `(P, R)` is missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalViolation {
    pub p: Word,
    pub s: Word,
    pub r: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalReport {
    pub depth: usize,
    pub lookahead: usize,
    pub chains_checked: usize,
    pub violations: Vec<DiagonalViolation>,
}

impl DiagonalReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `leaves` (all of one depth `n`) are closed under diagonals.
///
/// Chains `(P, S)`, `(S, R)` are read off the leaves at depth `n + lookahead`
/// and truncated to depth `n`; a chain whose truncations are in `leaves`
/// needs `dom(P) ∩ dom(R) ≠ ∅`. With `lookahead = 0` every chain of the
/// given leaves counts, which overstates violations since two leaves through
/// `S` may sit at different points of `dom(S)`.
pub fn diagonal_closure_check(
    sys: &IsometrySystem,
    leaves: &[LeafPair],
    lookahead: usize,
) -> Result<DiagonalReport> {
    let depth = leaves.first().map_or(0, |l| l.x.len());
    if leaves.iter().any(|l| l.x.len() != depth || l.y.len() != depth) {
        return Err(Error::input("leaves must share one depth"));
    }
    let mut report = DiagonalReport {
        depth,
        lookahead,
        chains_checked: 0,
        violations: Vec::new(),
    };
    if leaves.is_empty() {
        return Ok(report);
    }
    let known: BTreeSet<(Word, Word)> = leaves
        .iter()
        .flat_map(|l| [(l.x.clone(), l.y.clone()), (l.y.clone(), l.x.clone())])
        .collect();
    let deep = if lookahead == 0 {
        leaves.to_vec()
    } else {
        unit_cylinder_leaves(sys, depth + lookahead)?
    };
    let mut partners: BTreeMap<Word, BTreeSet<Word>> = BTreeMap::new();
    for l in &deep {
        partners.entry(l.x.clone()).or_default().insert(l.y.clone());
        partners.entry(l.y.clone()).or_default().insert(l.x.clone());
    }
    let t = sys.tree();
    let mut doms: BTreeMap<Word, Subtree> = BTreeMap::new();
    let mut seen: BTreeSet<(Word, Word, Word)> = BTreeSet::new();
    for (s, ps) in &partners {
        let ps: Vec<&Word> = ps.iter().collect();
        for (i, p) in ps.iter().enumerate() {
            for r in &ps[i + 1..] {
                let (p, s, r) = (p.prefix(depth), s.prefix(depth), r.prefix(depth));
                if p == r || !known.contains(&(p.clone(), s.clone())) || !known.contains(&(s.clone(), r.clone())) {
                    continue;
                }
                let key = if p < r { (p, s, r) } else { (r, s, p) };
                if !seen.insert(key.clone()) {
                    continue;
                }
                report.chains_checked += 1;
                let (p, s, r) = key;
                for x in [&p, &r] {
                    if !doms.contains_key(x) {
                        doms.insert(x.clone(), sys.dom(x));
                    }
                }
                if t.meet_subtrees(&doms[&p], &doms[&r]).is_empty() {
                    report.violations.push(DiagonalViolation { p, s, r });
                }
            }
        }
    }
    Ok(report)
}
