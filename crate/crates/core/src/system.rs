//! Systems of partial isometries and the right pseudo-action of words on `K`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{Embedding, MetricTree, Subtree, TreePoint};
use crate::words::{Alphabet, InfiniteWord, Letter, Word};

/// An isometry between closed subtrees, fixed by where it sends the
/// extremal points of its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    dom: Subtree,
    img: Subtree,
    src: Vec<TreePoint>,
    dst: Vec<TreePoint>,
}

fn transfer(t: &MetricTree, from: &[TreePoint], to: &[TreePoint], x: &TreePoint) -> TreePoint {
    if from.len() == 1 {
        return to[0].clone();
    }
    let d0 = t.dist(&from[0], x);
    for i in 1..from.len() {
        if t.on_arc(&from[0], &from[i], x) {
            return t.at(&to[0], &to[i], &d0);
        }
    }
    panic!("transfer of a point outside the domain hull")
}

impl PartialMap {
    pub fn empty() -> Self {
        PartialMap {
            dom: Subtree::empty(),
            img: Subtree::empty(),
            src: Vec::new(),
            dst: Vec::new(),
        }
    }

    pub fn identity(s: &Subtree) -> Self {
        PartialMap {
            dom: s.clone(),
            img: s.clone(),
            src: s.extremals().to_vec(),
            dst: s.extremals().to_vec(),
        }
    }

    /// Pairs must already be minimal extremal points of their hull.
    fn from_pairs(t: &MetricTree, mut pairs: Vec<(TreePoint, TreePoint)>) -> Self {
        if pairs.is_empty() {
            return PartialMap::empty();
        }
        pairs.sort();
        pairs.dedup();
        let (src, dst): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        PartialMap {
            dom: t.subtree_raw(src.clone()),
            img: t.subtree_raw(dst.clone()),
            src,
            dst,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dom.is_empty()
    }

    pub fn domain(&self) -> &Subtree {
        &self.dom
    }

    pub fn image(&self) -> &Subtree {
        &self.img
    }

    /// Images of `domain().extremals()`, in the same order.
    pub fn images(&self) -> &[TreePoint] {
        &self.dst
    }

    pub fn inverse(&self) -> PartialMap {
        let mut pairs: Vec<(TreePoint, TreePoint)> =
            self.dst.iter().cloned().zip(self.src.iter().cloned()).collect();
        pairs.sort();
        let (src, dst): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        PartialMap {
            dom: self.img.clone(),
            img: self.dom.clone(),
            src,
            dst,
        }
    }

    pub fn apply(&self, t: &MetricTree, x: &TreePoint) -> Option<TreePoint> {
        if self.is_empty() || !t.contains(&self.dom, x) {
            return None;
        }
        Some(transfer(t, &self.src, &self.dst, x))
    }

    pub(crate) fn apply_inside(&self, t: &MetricTree, x: &TreePoint) -> TreePoint {
        transfer(t, &self.src, &self.dst, x)
    }

    /// Image of a subtree of the domain.
    pub fn map_subtree(&self, t: &MetricTree, s: &Subtree) -> Subtree {
        let pts: Vec<TreePoint> = s.extremals().iter().map(|x| self.apply_inside(t, x)).collect();
        t.subtree_raw(pts)
    }

    /// `x ↦ (x·self)·other`.
    pub fn then(&self, t: &MetricTree, other: &PartialMap) -> PartialMap {
        let mid = t.meet_subtrees(&self.img, &other.dom);
        if mid.is_empty() {
            return PartialMap::empty();
        }
        let pairs = mid
            .extremals()
            .iter()
            .map(|y| (transfer(t, &self.dst, &self.src, y), other.apply_inside(t, y)))
            .collect();
        PartialMap::from_pairs(t, pairs)
    }

    /// True if the map is the identity on a nondegenerate domain.
    pub fn fixes_pointwise(&self) -> bool {
        !self.is_empty() && self.src == self.dst
    }
}

/// A named generator of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialIsometry {
    pub name: String,
    map: PartialMap,
}

impl PartialIsometry {
    pub fn domain(&self) -> &Subtree {
        self.map.domain()
    }

    /// Images of the domain's extremal points, aligned with `domain().extremals()`.
    pub fn images(&self) -> &[TreePoint] {
        self.map.images()
    }

    pub fn image(&self) -> &Subtree {
        self.map.image()
    }

    pub fn map(&self) -> &PartialMap {
        &self.map
    }
}

/// Raw generator data: a name, domain points and their images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub domain: Vec<TreePoint>,
    pub images: Vec<TreePoint>,
}

/// A finite tree `K` with a finite family of nonempty partial isometries.
#[derive(Clone, Debug)]
pub struct IsometrySystem {
    tree: MetricTree,
    alphabet: Alphabet,
    gens: Vec<PartialIsometry>,
    // indexed by letter code
    maps: Vec<PartialMap>,
    whole: Subtree,
}

impl PartialEq for IsometrySystem {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree && self.alphabet == other.alphabet && self.gens == other.gens
    }
}

impl Eq for IsometrySystem {}

/// Whether every finite prefix of an infinite word is admissible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixStatus {
    Alive,
    /// The first prefix length whose domain is empty.
    Dead(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfiniteDom {
    pub status: PrefixStatus,
    pub domain: Subtree,
    pub diameter: Scalar,
    /// Domain diameters of the prefixes of length `1..=n` (empty ones omitted).
    pub diameters: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    /// A nontrivial admissible word fixing its nondegenerate domain pointwise.
    Fails { word: Word, domain: Subtree, diameter: Scalar },
    /// No certificate found; the largest domain diameter at full depth.
    Undecided { max_diameter: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub depth: usize,
    pub verdict: ProbeVerdict,
    /// Largest domain diameter over admissible words of length `depth`.
    pub max_diameter: Scalar,
    /// A word attaining `max_diameter`.
    pub widest: Option<Word>,
    pub survivors: usize,
    /// True if some level had more than `width` admissible words.
    pub truncated: bool,
}

/// The system induced on a subtree `K′ ⊆ K`, carried by `K′` as a tree of its own.
#[derive(Clone, Debug)]
pub struct Induced {
    pub system: IsometrySystem,
    pub embedding: Embedding,
}

impl IsometrySystem {
    pub fn new(tree: MetricTree, alphabet: Alphabet, specs: Vec<GeneratorSpec>) -> Result<Self> {
        if specs.len() != alphabet.rank() {
            return Err(Error::input(alloc::format!(
                "{} generators given for an alphabet of rank {}",
                specs.len(),
                alphabet.rank()
            )));
        }
        let mut gens = Vec::with_capacity(specs.len());
        for (g, spec) in specs.into_iter().enumerate() {
            if spec.name != alphabet.names()[g] {
                return Err(Error::input(alloc::format!(
                    "generator {g} is named '{}' but the alphabet says '{}'",
                    spec.name,
                    alphabet.names()[g]
                )));
            }
            gens.push(Self::validate(&tree, spec)?);
        }
        Ok(Self::assemble(tree, alphabet, gens))
    }

    fn validate(tree: &MetricTree, spec: GeneratorSpec) -> Result<PartialIsometry> {
        let name = spec.name;
        if spec.domain.is_empty() {
            return Err(Error::input(alloc::format!("generator '{name}' has an empty domain")));
        }
        if spec.domain.len() != spec.images.len() {
            return Err(Error::input(alloc::format!(
                "generator '{name}' has {} domain points and {} images",
                spec.domain.len(),
                spec.images.len()
            )));
        }
        for p in spec.domain.iter().chain(&spec.images) {
            tree.check_point(p)
                .map_err(|e| Error::input(alloc::format!("generator '{name}': {e}")))?;
        }
        for i in 0..spec.domain.len() {
            for j in i + 1..spec.domain.len() {
                let expected = tree.dist(&spec.domain[i], &spec.domain[j]);
                let found = tree.dist(&spec.images[i], &spec.images[j]);
                if expected != found {
                    return Err(Error::IsometryViolation {
                        generator: name,
                        i,
                        j,
                        expected: alloc::format!("{expected}"),
                        found: alloc::format!("{found}"),
                    });
                }
            }
        }
        let dom = tree.hull_of(&spec.domain);
        let pairs = dom
            .extremals()
            .iter()
            .map(|x| {
                let k = spec.domain.iter().position(|p| p == x).expect("extremal is a listed point");
                (x.clone(), spec.images[k].clone())
            })
            .collect();
        Ok(PartialIsometry {
            name,
            map: PartialMap::from_pairs(tree, pairs),
        })
    }

    fn assemble(tree: MetricTree, alphabet: Alphabet, gens: Vec<PartialIsometry>) -> Self {
        let mut maps = Vec::with_capacity(2 * gens.len());
        for g in &gens {
            maps.push(g.map.clone());
            maps.push(g.map.inverse());
        }
        let whole = tree.whole();
        IsometrySystem {
            tree,
            alphabet,
            gens,
            maps,
            whole,
        }
    }

    pub fn tree(&self) -> &MetricTree {
        &self.tree
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[PartialIsometry] {
        &self.gens
    }

    /// `K` as a subtree of itself.
    pub fn whole(&self) -> &Subtree {
        &self.whole
    }

    pub fn letter_map(&self, l: Letter) -> &PartialMap {
        &self.maps[l.code() as usize]
    }

    /// The raw data of each generator, suitable for rebuilding the system.
    pub fn specs(&self) -> Vec<GeneratorSpec> {
        self.gens
            .iter()
            .map(|g| GeneratorSpec {
                name: g.name.clone(),
                domain: g.domain().extremals().to_vec(),
                images: g.images().to_vec(),
            })
            .collect()
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        self.alphabet.check_word(w)
    }

    /// `p · w`, or `None` when `p ∉ dom(w)`.
    pub fn apply(&self, p: &TreePoint, w: &Word) -> Result<Option<TreePoint>> {
        self.tree.check_point(p)?;
        self.check_word(w)?;
        let mut x = p.clone();
        for &l in w.letters() {
            match self.letter_map(l).apply(&self.tree, &x) {
                Some(y) => x = y,
                None => return Ok(None),
            }
        }
        Ok(Some(x))
    }

    /// `dom(w)`, pulled back letter by letter from the end of the word.
    pub fn dom(&self, w: &Word) -> Subtree {
        let t = &self.tree;
        let mut d = self.whole.clone();
        for &l in w.letters().iter().rev() {
            let m = self.letter_map(l);
            let inside = t.meet_subtrees(&d, m.image());
            if inside.is_empty() {
                return Subtree::empty();
            }
            d = self.letter_map(l.inverse()).map_subtree(t, &inside);
        }
        d
    }

    pub fn image(&self, w: &Word) -> Subtree {
        self.dom(&w.inverse())
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        !self.dom(w).is_empty()
    }

    /// The composed partial isometry of `w`.
    pub fn word_map(&self, w: &Word) -> PartialMap {
        let mut m = PartialMap::identity(&self.whole);
        for &l in w.letters() {
            m = m.then(&self.tree, self.letter_map(l));
            if m.is_empty() {
                break;
            }
        }
        m
    }

    /// Tracks `dom` of the prefixes of an infinite word.
    pub fn infinite_dom(&self, x: &InfiniteWord, n: usize) -> Result<InfiniteDom> {
        if n == 0 {
            return Err(Error::input("depth must be at least 1"));
        }
        let w = x.prefix(n)?;
        self.check_word(&w)?;
        let t = &self.tree;
        let mut img = self.whole.clone();
        let mut diameters = Vec::new();
        for (i, &l) in w.letters().iter().enumerate() {
            let m = self.letter_map(l);
            let inside = t.meet_subtrees(&img, m.domain());
            if inside.is_empty() {
                return Ok(InfiniteDom {
                    status: PrefixStatus::Dead(i + 1),
                    domain: Subtree::empty(),
                    diameter: Scalar::zero(),
                    diameters,
                });
            }
            img = m.map_subtree(t, &inside);
            diameters.push(t.diameter(&img));
        }
        let domain = self.dom(&w);
        let diameter = t.diameter(&domain);
        Ok(InfiniteDom {
            status: PrefixStatus::Alive,
            domain,
            diameter,
            diameters,
        })
    }

    /// Searches admissible words up to `depth` for a pointwise-fixing certificate,
    /// and measures the widest domain at full depth.
    pub fn independent_generators_probe(&self, depth: usize, width: usize) -> Result<ProbeReport> {
        if depth == 0 {
            return Err(Error::input("depth must be at least 1"));
        }
        let t = &self.tree;
        let mut level: Vec<(Word, PartialMap)> = Vec::from([(Word::empty(), PartialMap::identity(&self.whole))]);
        let mut certificate: Option<(Word, Subtree, Scalar)> = None;
        let mut truncated = false;
        for _ in 0..depth {
            let mut next = Vec::new();
            for (w, m) in &level {
                for code in 0..2 * self.rank() as u8 {
                    let l = Letter::from_code(code);
                    if w.last() == Some(l.inverse()) {
                        continue;
                    }
                    let m2 = m.then(t, self.letter_map(l));
                    if m2.is_empty() {
                        continue;
                    }
                    let w2 = w.times(l);
                    if certificate.is_none() && m2.fixes_pointwise() {
                        let diam = t.diameter(m2.domain());
                        if diam.is_positive() {
                            certificate = Some((w2.clone(), m2.domain().clone(), diam));
                        }
                    }
                    next.push((w2, m2));
                }
            }
            if next.len() > width {
                truncated = true;
                next.truncate(width);
            }
            level = next;
        }
        let mut max_diameter = Scalar::zero();
        let mut widest = None;
        for (w, m) in &level {
            let d = t.diameter(m.domain());
            if widest.is_none() || d > max_diameter {
                max_diameter = d;
                widest = Some(w.clone());
            }
        }
        let verdict = match certificate {
            Some((word, domain, diameter)) => ProbeVerdict::Fails {
                word,
                domain,
                diameter,
            },
            None => ProbeVerdict::Undecided {
                max_diameter: max_diameter.clone(),
            },
        };
        Ok(ProbeReport {
            depth,
            verdict,
            max_diameter,
            widest,
            survivors: level.len(),
            truncated,
        })
    }

    /// The generator `g` restricted to `{x ∈ K′ : x·g ∈ K′}`.
    pub fn induced_map(&self, kprime: &Subtree, g: usize) -> PartialMap {
        let t = &self.tree;
        let m = &self.gens[g].map;
        let target = t.meet_subtrees(kprime, m.image());
        if target.is_empty() {
            return PartialMap::empty();
        }
        let back = m.inverse().map_subtree(t, &target);
        let dom = t.meet_subtrees(&back, kprime);
        if dom.is_empty() {
            return PartialMap::empty();
        }
        let pairs = dom
            .extremals()
            .iter()
            .map(|x| (x.clone(), m.apply_inside(t, x)))
            .collect();
        PartialMap::from_pairs(t, pairs)
    }

    /// Names of generators whose restriction to `K′` is empty.
    pub fn empty_on(&self, kprime: &Subtree) -> Vec<String> {
        (0..self.rank())
            .filter(|&g| self.induced_map(kprime, g).is_empty())
            .map(|g| self.gens[g].name.clone())
            .collect()
    }

    /// The induced system on `K′`; every induced generator must be nonempty.
    pub fn induced(&self, kprime: &Subtree) -> Result<Induced> {
        let t = &self.tree;
        if kprime.is_empty() || !t.is_subset(kprime, &self.whole) {
            return Err(Error::input("K′ must be a nonempty subtree of K"));
        }
        let empty = self.empty_on(kprime);
        if !empty.is_empty() {
            return Err(Error::input(alloc::format!(
                "induced generator(s) {} are empty on K′",
                empty.join(", ")
            )));
        }
        let embedding = t.extract(kprime)?;
        let mut specs = Vec::new();
        for g in 0..self.rank() {
            let m = self.induced_map(kprime, g);
            let conv = |p: &TreePoint| embedding.restrict(t, p).expect("induced point lies in K′");
            specs.push(GeneratorSpec {
                name: self.gens[g].name.clone(),
                domain: m.src.iter().map(conv).collect(),
                images: m.dst.iter().map(conv).collect(),
            });
        }
        let system = IsometrySystem::new(embedding.small.clone(), self.alphabet.clone(), specs)?;
        Ok(Induced { system, embedding })
    }
}
