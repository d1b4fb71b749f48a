//! Reduced words over `A^{±1}`, their enumeration, and infinite words.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A letter of `A^{±1}`, coded as `2·generator + inverse`.
///
/// The derived order is `a < A < b < B < …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < 128, "too many generators");
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn positive(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// The generator names of a free basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Names must be distinct, start with a lowercase ASCII letter, and be alphanumeric.
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::input("an alphabet needs at least one generator"));
        }
        if names.len() > 127 {
            return Err(Error::input("at most 127 generators are supported"));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_ascii_alphanumeric() && !c.is_ascii_uppercase());
            if !ok {
                return Err(Error::input(alloc::format!(
                    "generator name '{n}' must be lowercase alphanumeric"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::input(alloc::format!("generator name '{n}' is repeated")));
            }
        }
        Ok(Alphabet { names })
    }

    /// `a, b, c, …`.
    pub fn standard(n: usize) -> Self {
        assert!((1..=26).contains(&n));
        let names = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        Alphabet { names }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, token: &str) -> Result<Letter> {
        if let Some(g) = self.names.iter().position(|n| n == token) {
            return Ok(Letter::positive(g));
        }
        let lower = token.to_ascii_lowercase();
        if token != lower {
            if let Some(g) = self.names.iter().position(|n| n.to_ascii_uppercase() == token) {
                return Ok(Letter::new(g, true));
            }
        }
        Err(Error::input(alloc::format!("unknown letter '{token}'")))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let n = &self.names[l.generator()];
        if l.is_inverse() {
            n.to_ascii_uppercase()
        } else {
            n.clone()
        }
    }

    fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.len() == 1)
    }

    /// Reads `a.b.A.B`, or the compact `abAB` when all names are one character.
    /// `1` and the empty string denote the empty word. No reduction is applied.
    pub fn parse_letters(&self, s: &str) -> Result<Vec<Letter>> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        if s.contains('.') {
            return s.split('.').map(|t| self.letter(t.trim())).collect();
        }
        if self.single_char() {
            let mut buf = [0u8; 4];
            return s.chars().map(|c| self.letter(c.encode_utf8(&mut buf))).collect();
        }
        Ok(vec![self.letter(s)?])
    }

    /// Parses and freely reduces.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Ok(reduce(&self.parse_letters(s)?))
    }

    pub fn format(&self, w: &Word) -> String {
        self.format_letters(w.letters())
    }

    pub fn format_letters(&self, ls: &[Letter]) -> String {
        if ls.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = ls.iter().map(|&l| self.letter_name(l)).collect();
        parts.join(".")
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.generator() >= self.rank()) {
            Some(l) => Err(Error::input(alloc::format!("letter code {} is outside the alphabet", l.code()))),
            None => Ok(()),
        }
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Free reduction by a single stack pass.
pub fn reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// The reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        reduce(&v)
    }

    /// Appends a letter, cancelling if needed.
    pub fn times(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        if v.last() == Some(&l.inverse()) {
            v.pop();
        } else {
            v.push(l);
        }
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k.min(self.len())..].to_vec())
    }

    /// Letters `i..j` (0-based, half-open).
    pub fn subword(&self, i: usize, j: usize) -> Word {
        Word(self.0[i..j].to_vec())
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut acc = Word::empty();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| !l.is_inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// `(u, c)` with `self = u·c·u⁻¹` and `c` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (self.prefix(k), self.subword(k, n - k))
    }

    /// Removes the first and last `k` letters.
    pub fn chop(&self, k: usize) -> Result<Word> {
        if self.len() < 2 * k {
            return Err(Error::input(alloc::format!(
                "cannot chop {k} letters from each end of a word of length {}",
                self.len()
            )));
        }
        Ok(self.subword(k, self.len() - k))
    }

    /// All cyclic rotations, starting with `self`.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.len();
        (0..n.max(1))
            .map(|i| {
                let mut v = self.0[i..].to_vec();
                v.extend_from_slice(&self.0[..i]);
                Word(v)
            })
            .collect()
    }

    /// Wraps letters already known to be reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Word> {
        if letters.windows(2).any(|p| p[0] == p[1].inverse()) {
            return Err(Error::input("letters are not freely reduced"));
        }
        Ok(Word(letters))
    }
}

/// `2N(2N−1)^{n−1}`, or 1 for `n = 0`.
pub fn count_reduced(rank: usize, n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let k = 2 * rank as u128;
    (0..n - 1).fold(k, |acc, _| acc.saturating_mul(k - 1))
}

/// All reduced words of one length extending a fixed prefix, in lexicographic order.
///
/// Distinct prefixes give disjoint shards that can be walked independently.
#[derive(Clone, Debug)]
pub struct ReducedWords {
    codes: u8,
    fixed: usize,
    cur: Option<Vec<Letter>>,
}

impl ReducedWords {
    pub fn new(rank: usize, len: usize) -> Self {
        ReducedWords::with_prefix(rank, &Word::empty(), len)
    }

    pub fn with_prefix(rank: usize, prefix: &Word, len: usize) -> Self {
        let codes = (2 * rank) as u8;
        if prefix.len() > len || prefix.letters().iter().any(|l| l.code() >= codes) {
            return ReducedWords { codes, fixed: 0, cur: None };
        }
        let mut v = prefix.letters().to_vec();
        while v.len() < len {
            let l = Self::smallest_after(v.last().copied(), None, codes);
            match l {
                Some(l) => v.push(l),
                None => return ReducedWords { codes, fixed: 0, cur: None },
            }
        }
        ReducedWords {
            codes,
            fixed: prefix.len(),
            cur: Some(v),
        }
    }

    fn smallest_after(prev: Option<Letter>, above: Option<Letter>, codes: u8) -> Option<Letter> {
        let start = above.map_or(0, |l| l.code() + 1);
        (start..codes)
            .map(Letter::from_code)
            .find(|&l| prev.is_none_or(|p| p.inverse() != l))
    }

    fn advance(&mut self) {
        let Some(v) = self.cur.as_mut() else { return };
        let mut i = v.len();
        loop {
            if i <= self.fixed {
                self.cur = None;
                return;
            }
            i -= 1;
            let prev = if i == 0 { None } else { Some(v[i - 1]) };
            if let Some(l) = Self::smallest_after(prev, Some(v[i]), self.codes) {
                v[i] = l;
                for j in i + 1..v.len() {
                    v[j] = Self::smallest_after(Some(v[j - 1]), None, self.codes).expect("rank ≥ 1");
                }
                return;
            }
        }
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let w = Word(self.cur.clone()?);
        self.advance();
        Some(w)
    }
}

pub fn enumerate_reduced(rank: usize, n: usize) -> ReducedWords {
    ReducedWords::new(rank, n)
}

/// How an infinite word produces its letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordSource {
    /// `w^∞` for a nonempty cyclically reduced `w`.
    Periodic(Word),
    /// The fixed point of a substitution starting from `seed`; `images[g]`
    /// is the image of generator `g`, inverses map to inverted images.
    Substitution { images: Vec<Option<Word>>, seed: Letter },
    /// Finitely many known letters; asking beyond them is an error.
    Explicit(Word),
}

impl WordSource {
    fn take(&self, n: usize) -> Result<Vec<Letter>> {
        match self {
            WordSource::Periodic(w) => Ok(w.letters().iter().copied().cycle().take(n).collect()),
            WordSource::Explicit(w) => {
                if n > w.len() {
                    return Err(Error::input(alloc::format!(
                        "explicit word has {} letters, {} requested",
                        w.len(),
                        n
                    )));
                }
                Ok(w.letters()[..n].to_vec())
            }
            WordSource::Substitution { images, seed } => {
                let mut cur = vec![*seed];
                while cur.len() < n {
                    let mut next = Vec::with_capacity(cur.len() * 2);
                    for &l in &cur {
                        let img = images
                            .get(l.generator())
                            .and_then(|x| x.as_ref())
                            .ok_or_else(|| Error::input("substitution has no image for a letter"))?;
                        if l.is_inverse() {
                            next.extend(img.inverse().letters());
                        } else {
                            next.extend(img.letters());
                        }
                    }
                    if next.len() <= cur.len() {
                        return Err(Error::input("substitution does not grow from its seed"));
                    }
                    cur = next;
                }
                cur.truncate(n);
                Ok(cur)
            }
        }
    }
}

/// A one-sided infinite reduced word: `head`, then the source with `skip` letters dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfiniteWord {
    head: Vec<Letter>,
    skip: usize,
    source: WordSource,
}

impl InfiniteWord {
    pub fn periodic(w: &Word) -> Result<Self> {
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::input("a periodic word needs a nonempty cyclically reduced period"));
        }
        Ok(InfiniteWord {
            head: Vec::new(),
            skip: 0,
            source: WordSource::Periodic(w.clone()),
        })
    }

    pub fn explicit(w: &Word) -> Self {
        InfiniteWord {
            head: Vec::new(),
            skip: 0,
            source: WordSource::Explicit(w.clone()),
        }
    }

    /// Fixed point of a substitution; `σ(seed)` must begin with `seed` and be longer.
    pub fn substitution(images: Vec<Option<Word>>, seed: Letter) -> Result<Self> {
        let img = images
            .get(seed.generator())
            .and_then(|x| x.as_ref())
            .ok_or_else(|| Error::input("seed letter has no image"))?;
        let img = if seed.is_inverse() { img.inverse() } else { img.clone() };
        if img.len() < 2 || img.first() != Some(seed) {
            return Err(Error::input("the image of the seed must extend the seed"));
        }
        Ok(InfiniteWord {
            head: Vec::new(),
            skip: 0,
            source: WordSource::Substitution { images, seed },
        })
    }

    pub fn source(&self) -> &WordSource {
        &self.source
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Result<Word> {
        let from_head = n.min(self.head.len());
        let mut v = self.head[..from_head].to_vec();
        let rest = n - from_head;
        if rest > 0 {
            let src = self.source.take(self.skip + rest)?;
            v.extend_from_slice(&src[self.skip..]);
        }
        Word::from_reduced(v).map_err(|_| Error::input("infinite word prefix is not reduced"))
    }

    pub fn first(&self) -> Result<Letter> {
        Ok(self.prefix(1)?.letters()[0])
    }

    /// The word with its first letter removed.
    pub fn tail(&self) -> InfiniteWord {
        let mut out = self.clone();
        if out.head.is_empty() {
            out.skip += 1;
        } else {
            out.head.remove(0);
        }
        out
    }

    /// `l` followed by this word; errors if `l` cancels the first letter.
    pub fn prepend(&self, l: Letter) -> Result<InfiniteWord> {
        if self.first()? == l.inverse() {
            return Err(Error::input("prepending would cancel"));
        }
        let mut out = self.clone();
        out.head.insert(0, l);
        Ok(out)
    }
}

/// The fixed point of `b ↦ ba`, `a ↦ b`: `b a b b a b a b …`.
pub fn fib_gen(a: Letter, b: Letter) -> InfiniteWord {
    assert!(!a.is_inverse() && !b.is_inverse() && a != b);
    let rank = a.generator().max(b.generator()) + 1;
    let mut images = vec![None; rank];
    images[b.generator()] = Some(Word(vec![b, a]));
    images[a.generator()] = Some(Word(vec![b]));
    InfiniteWord::substitution(images, b).expect("b ↦ ba extends b")
}

/// `Z = (Z⁻)⁻¹ · Z⁺` with distinct first letters; the marker sits between the halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiinfiniteWord {
    pub neg: InfiniteWord,
    pub pos: InfiniteWord,
}

impl BiinfiniteWord {
    pub fn new(neg: InfiniteWord, pos: InfiniteWord) -> Result<Self> {
        if neg.first()? == pos.first()? {
            return Err(Error::input("the two halves must start with different letters"));
        }
        Ok(BiinfiniteWord { neg, pos })
    }

    /// Moves the marker `steps` letters forward (negative: backward).
    pub fn shift(&self, steps: i64) -> Result<Self> {
        let mut z = self.clone();
        for _ in 0..steps.unsigned_abs() {
            z = if steps > 0 {
                let y1 = z.pos.first()?;
                BiinfiniteWord {
                    neg: z.neg.prepend(y1.inverse())?,
                    pos: z.pos.tail(),
                }
            } else {
                let x1 = z.neg.first()?;
                BiinfiniteWord {
                    pos: z.pos.prepend(x1.inverse())?,
                    neg: z.neg.tail(),
                }
            };
        }
        Ok(z)
    }

    /// The two halves to the given depth.
    pub fn window(&self, depth: usize) -> Result<(Word, Word)> {
        Ok((self.neg.prefix(depth)?, self.pos.prefix(depth)?))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            let c = (b'a' + l.generator() as u8) as char;
            let c = if l.is_inverse() { c.to_ascii_uppercase() } else { c };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::standard(2)
    }

    fn w(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    #[test]
    fn reduction() {
        let a = ab();
        assert_eq!(reduce(&a.parse_letters("a.b.B").unwrap()), w("a"));
        assert_eq!(reduce(&[]), Word::empty());
        assert_eq!(reduce(&a.parse_letters("aAa").unwrap()), w("a"));
        assert!(a.parse_letters("a.c").is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_reduced(2, 1).count(), 4);
        assert_eq!(enumerate_reduced(2, 2).count(), 12);
        let one: Vec<Word> = enumerate_reduced(1, 3).collect();
        assert_eq!(one, vec![w("aaa"), w("AAA")]);
        let all: Vec<Word> = enumerate_reduced(2, 4).collect();
        assert_eq!(all.len() as u128, count_reduced(2, 4));
        assert!(all.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(enumerate_reduced(2, 0).collect::<Vec<_>>(), vec![Word::empty()]);
        let shard: Vec<Word> = ReducedWords::with_prefix(2, &w("b"), 3).collect();
        assert_eq!(shard.len(), 9);
        assert!(shard.iter().all(|x| x.first() == w("b").first()));
    }

    #[test]
    fn cyclic_reduction() {
        assert_eq!(w("a.b.A").cyclic_reduce(), (w("a"), w("b")));
        assert_eq!(w("a.b").cyclic_reduce(), (Word::empty(), w("a.b")));
        assert_eq!(w("a.b.b.A").cyclic_reduce(), (w("a"), w("b.b")));
    }

    #[test]
    fn chopping() {
        assert_eq!(w("abab").chop(1).unwrap(), w("ba"));
        assert_eq!(w("abab").chop(0).unwrap(), w("abab"));
        assert_eq!(w("abba").chop(2).unwrap(), Word::empty());
        assert!(w("ab").chop(2).is_err());
    }

    #[test]
    fn fibonacci_prefixes() {
        let f = fib_gen(Letter::positive(0), Letter::positive(1));
        assert_eq!(f.prefix(1).unwrap(), w("b"));
        assert_eq!(f.prefix(3).unwrap(), w("bab"));
        assert_eq!(f.prefix(5).unwrap(), w("babba"));
        assert_eq!(f.prefix(8).unwrap(), w("babbabab"));
    }

    #[test]
    fn shifting() {
        let p = InfiniteWord::periodic(&w("ab")).unwrap();
        let q = InfiniteWord::periodic(&w("BA")).unwrap();
        let z = BiinfiniteWord::new(q, p).unwrap();
        assert_eq!(z.shift(0).unwrap(), z);
        let z2 = z.shift(2).unwrap();
        assert_eq!(z2.window(10).unwrap(), z.window(10).unwrap());
        let z1 = z.shift(1).unwrap();
        assert_eq!(z1.pos.prefix(3).unwrap(), w("bab"));
        assert_eq!(z1.neg.prefix(3).unwrap(), w("ABA"));
        assert_eq!(z1.shift(-1).unwrap().window(6).unwrap(), z.window(6).unwrap());
    }

    #[test]
    fn formatting() {
        let a = ab();
        assert_eq!(a.format(&w("a.b.A.B")), "a.b.A.B");
        assert_eq!(a.format(&Word::empty()), "1");
        let long = Alphabet::new(vec!["x1".into(), "y".into()]).unwrap();
        assert_eq!(long.format(&long.parse_word("x1.Y").unwrap()), "x1.Y");
        assert!(Alphabet::new(vec!["a".into(), "a".into()]).is_err());
        assert!(Alphabet::new(vec!["A".into()]).is_err());
    }
}
