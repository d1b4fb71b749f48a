//! Nested subtrees of a host system, their induced systems, and translation
//! lengths across the stages.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::heart::cyclic_classes;
use crate::lamination::GapOracle;
use crate::scalar::Scalar;
use crate::suspension::BallTree;
use crate::system::{Induced, IsometrySystem};
use crate::tree::{Subtree, TreePoint};
use crate::words::{Letter, Word};

#[derive(Clone, Debug)]
pub struct Stage {
    /// The subtree, in host coordinates.
    pub subtree: Subtree,
    pub induced: Induced,
}

#[derive(Clone, Debug)]
pub struct ApproxSequence {
    pub host: IsometrySystem,
    pub stages: Vec<Stage>,
    /// Leading stages dropped for empty induced generators, with their names.
    pub skipped: Vec<(usize, Vec<String>)>,
}

/// Builds the induced systems on `subtrees`, which must increase.
pub fn build_sequence(host: &IsometrySystem, subtrees: &[Subtree]) -> Result<ApproxSequence> {
    let t = host.tree();
    if subtrees.is_empty() {
        return Err(Error::input("no stages"));
    }
    for (i, s) in subtrees.iter().enumerate() {
        t.check_subtree(s)?;
        if s.is_empty() || !t.is_subset(s, host.whole()) {
            return Err(Error::input(alloc::format!("stage {} is not a nonempty subtree of K", i + 1)));
        }
        if i > 0 && !t.is_subset(&subtrees[i - 1], s) {
            return Err(Error::input(alloc::format!(
                "stage {} does not contain stage {}",
                i + 1,
                i
            )));
        }
    }
    let mut skipped = Vec::new();
    let mut stages = Vec::new();
    for (i, s) in subtrees.iter().enumerate() {
        let empty = host.empty_on(s);
        if !empty.is_empty() {
            if stages.is_empty() {
                skipped.push((i, empty));
                continue;
            }
            return Err(Error::invariant("an induced generator vanished on a larger stage"));
        }
        stages.push(Stage {
            subtree: s.clone(),
            induced: host.induced(s)?,
        });
    }
    if stages.is_empty() {
        return Err(Error::input("every stage has an empty induced generator"));
    }
    Ok(ApproxSequence {
        host: host.clone(),
        stages,
        skipped,
    })
}

/// Distinct points `base · w` over words `w` in length-lexicographic order, up to `count`.
pub fn orbit_points(sys: &IsometrySystem, base: &TreePoint, count: usize, max_len: usize) -> Result<Vec<TreePoint>> {
    sys.tree().check_point(base)?;
    let t = sys.tree();
    let mut seen: BTreeSet<TreePoint> = BTreeSet::new();
    let mut out = Vec::new();
    let mut level = Vec::from([(Word::empty(), base.clone())]);
    seen.insert(base.clone());
    out.push(base.clone());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, p) in &level {
            for c in 0..2 * sys.rank() as u8 {
                let l = Letter::from_code(c);
                if w.last() == Some(l.inverse()) {
                    continue;
                }
                if let Some(q) = sys.letter_map(l).apply(t, p) {
                    if seen.insert(q.clone()) {
                        out.push(q.clone());
                        if out.len() == count {
                            return Ok(out);
                        }
                    }
                    next.push((w.times(l), q));
                }
            }
        }
        level = next;
    }
    Ok(out)
}

impl ApproxSequence {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Sends `x` in stage `from` coordinates to stage `to` coordinates (`from ≤ to`).
    pub fn carry(&self, from: usize, to: usize, x: &TreePoint) -> Result<TreePoint> {
        let t = self.host.tree();
        let hx = self.stages[from].induced.embedding.embed(t, x);
        self.stages[to]
            .induced
            .embedding
            .restrict(t, &hx)
            .ok_or_else(|| Error::invariant("stage point leaves a larger stage"))
    }

    /// `j_{to,from}` between balls of two stages: `(u, x) ↦ (u, x)`.
    pub fn morphism(&self, from: usize, to: usize, small: &BallTree, big: &BallTree, p: &TreePoint) -> Result<TreePoint> {
        let (u, x) = small.unlocate(p)?;
        big.locate(&u, &self.carry(from, to, &x)?)
    }

    pub fn diameters(&self) -> Vec<Scalar> {
        self.stages
            .iter()
            .map(|s| self.host.tree().diameter(&s.subtree))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Length(Scalar),
    /// The chain ball needed more copies than the budget.
    OverBudget { needed: u64 },
}

impl Cell {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Cell::Length(s) => Some(s),
            Cell::OverBudget { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthTable {
    pub words: Vec<Word>,
    /// `rows[i][j]` is `‖words[i]‖` on stage `j`.
    pub rows: Vec<Vec<Cell>>,
    pub host: Vec<Cell>,
}

impl LengthTable {
    /// Non-increasing across the stages, ignoring marked cells.
    pub fn row_monotone(&self, i: usize) -> bool {
        let vals: Vec<&Scalar> = self.rows[i].iter().filter_map(Cell::value).collect();
        vals.windows(2).all(|w| w[0] >= w[1])
    }

    /// Every stage value is at least the host value.
    pub fn row_above_host(&self, i: usize) -> bool {
        match self.host[i].value() {
            Some(h) => self.rows[i].iter().filter_map(Cell::value).all(|v| v >= h),
            None => true,
        }
    }

    pub fn row_ends_at_host(&self, i: usize) -> bool {
        matches!((self.rows[i].last().and_then(Cell::value), self.host[i].value()), (Some(a), Some(b)) if a == b)
    }
}

fn cell(oracle: &mut GapOracle<'_>, w: &Word, budget: Option<u64>) -> Result<Cell> {
    // the chain of w² carries 2|w| + 1 copies
    let needed = 2 * w.len() as u64 + 1;
    if budget.is_some_and(|b| needed > b) {
        return Ok(Cell::OverBudget { needed });
    }
    Ok(Cell::Length(oracle.translation_length(w)?))
}

/// `‖w‖` on every stage and on the host.
pub fn length_table(seq: &ApproxSequence, words: &[Word], budget: Option<u64>) -> Result<LengthTable> {
    for w in words {
        seq.host.check_word(w)?;
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::input(alloc::format!("{w} must be nonempty and cyclically reduced")));
        }
    }
    let mut oracles: Vec<GapOracle<'_>> = seq.stages.iter().map(|s| GapOracle::new(&s.induced.system)).collect();
    let mut host_oracle = GapOracle::new(&seq.host);
    let mut rows = Vec::with_capacity(words.len());
    let mut host = Vec::with_capacity(words.len());
    for w in words {
        let mut row = Vec::with_capacity(oracles.len());
        for o in oracles.iter_mut() {
            row.push(cell(o, w, budget)?);
        }
        rows.push(row);
        host.push(cell(&mut host_oracle, w, budget)?);
    }
    Ok(LengthTable {
        words: words.to_vec(),
        rows,
        host,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub word_len: usize,
    pub words: usize,
    /// Per stage, `max_w (‖w‖_stage − ‖w‖_host)`.
    pub gaps: Vec<Scalar>,
    pub non_increasing: bool,
    pub final_gap: Scalar,
    /// Stages whose laminary closure at depth `word_len` is empty.
    pub empty_laminations: Vec<usize>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[0] > w[1])
    }
}

/// The largest length excess of each stage over the host, across all
/// rotation classes of cyclically reduced words up to `word_len`.
pub fn convergence_report(seq: &ApproxSequence, word_len: usize) -> Result<ConvergenceReport> {
    if word_len == 0 {
        return Err(Error::input("word length must be at least 1"));
    }
    let words = cyclic_classes(seq.host.rank(), word_len);
    let table = length_table(seq, &words, None)?;
    let mut gaps = Vec::with_capacity(seq.stages.len());
    for j in 0..seq.stages.len() {
        let mut g = Scalar::zero();
        for (row, h) in table.rows.iter().zip(&table.host) {
            if let (Some(v), Some(h)) = (row[j].value(), h.value()) {
                let d = v - h;
                if d > g {
                    g = d;
                }
            }
        }
        gaps.push(g);
    }
    let mut empty_laminations = Vec::new();
    for (j, s) in seq.stages.iter().enumerate() {
        let slice = crate::lamination::laminary_closure(&s.induced.system, word_len, word_len, false, None)?;
        if slice.words().is_empty() {
            empty_laminations.push(j);
        }
    }
    Ok(ConvergenceReport {
        word_len,
        words: words.len(),
        non_increasing: gaps.windows(2).all(|w| w[0] >= w[1]),
        final_gap: gaps.last().cloned().unwrap_or_else(Scalar::zero),
        gaps,
        empty_laminations,
    })
}
