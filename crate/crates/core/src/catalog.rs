//! Bundled example systems and interval exchange / translation generators.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{golden_alpha, Field, Scalar};
use crate::system::{GeneratorSpec, IsometrySystem};
use crate::tree::{MetricTree, Subtree, TreePoint};
use crate::words::Alphabet;

pub const NAMES: [&str; 5] = ["SYS-SHIFT", "SYS-POINT", "SYS-ID", "SYS-REFLECT", "SYS-GOLD"];

/// The point `p/q` on the first edge of `k`.
pub fn at(k: &MetricTree, p: i64, q: i64) -> TreePoint {
    k.edge_point(0, Scalar::ratio(p, q)).expect("point inside the segment")
}

/// The point at distance `t` from vertex 0 on a segment.
pub fn interval_point(k: &MetricTree, t: &Scalar) -> Result<TreePoint> {
    k.edge_point(0, t.clone())
}

pub fn by_name(name: &str) -> Option<IsometrySystem> {
    match name.to_ascii_uppercase().as_str() {
        "SYS-SHIFT" => Some(sys_shift()),
        "SYS-POINT" => Some(sys_point()),
        "SYS-ID" => Some(sys_id()),
        "SYS-REFLECT" => Some(sys_reflect()),
        "SYS-GOLD" => Some(sys_gold()),
        _ => None,
    }
}

pub fn all() -> Vec<(&'static str, IsometrySystem)> {
    NAMES.iter().map(|&n| (n, by_name(n).expect("bundled"))).collect()
}

fn single(k: MetricTree, domain: Vec<TreePoint>, images: Vec<TreePoint>) -> IsometrySystem {
    let spec = GeneratorSpec {
        name: "a".to_string(),
        domain,
        images,
    };
    IsometrySystem::new(k, Alphabet::standard(1), vec![spec]).expect("bundled system is valid")
}

/// `K = [0,2]`, `a: [0,1] → [1,2]`, `x ↦ x + 1`.
pub fn sys_shift() -> IsometrySystem {
    gen_itm(
        &Scalar::from_int(2),
        &[Translation {
            name: "a".into(),
            lo: Scalar::zero(),
            hi: Scalar::one(),
            shift: Scalar::one(),
        }],
    )
    .expect("bundled system is valid")
}

/// `K = [0,1]`, `a: {1} → {0}`.
pub fn sys_point() -> IsometrySystem {
    let k = MetricTree::segment(Scalar::one(), Field::Rational).expect("segment");
    single(k, vec![TreePoint::Vertex(1)], vec![TreePoint::Vertex(0)])
}

/// `K = [0,1]`, `a` the identity.
pub fn sys_id() -> IsometrySystem {
    let k = MetricTree::segment(Scalar::one(), Field::Rational).expect("segment");
    let ends = vec![TreePoint::Vertex(0), TreePoint::Vertex(1)];
    single(k, ends.clone(), ends)
}

/// `K = [0,2]`, `a: x ↦ 2 − x`.
pub fn sys_reflect() -> IsometrySystem {
    let k = MetricTree::segment(Scalar::from_int(2), Field::Rational).expect("segment");
    single(
        k,
        vec![TreePoint::Vertex(0), TreePoint::Vertex(1)],
        vec![TreePoint::Vertex(1), TreePoint::Vertex(0)],
    )
}

/// The golden rotation on `[0,1]`: `a: [0,α²] → [α,1]`, `b: [α²,1] → [0,α]`.
pub fn sys_gold() -> IsometrySystem {
    let a = golden_alpha();
    let spec = IetSpec {
        length: Scalar::one(),
        lengths: vec![&a * &a, a],
        perm: vec![2, 1],
        names: None,
    };
    gen_iet(&spec).expect("bundled system is valid")
}

/// `α = (√5 − 1)/2` as stored in bundled data: `a = −1/2`, `b = 1/2`, `d = 5`.
pub fn gold_alpha_parts() -> (BigRational, BigRational, u32) {
    (
        BigRational::new(BigInt::from(-1), BigInt::from(2)),
        BigRational::new(BigInt::from(1), BigInt::from(2)),
        5,
    )
}

/// An interval exchange on `[0, length]`.
///
/// `perm[i]` is the 1-based position of subinterval `i` after the exchange.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IetSpec {
    pub length: Scalar,
    pub lengths: Vec<Scalar>,
    pub perm: Vec<usize>,
    pub names: Option<Vec<String>>,
}

fn field_of<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> Result<Field> {
    let mut f = Field::Rational;
    for x in xs {
        if x.radicand() != 0 {
            f = f.join(Field::quadratic(x.radicand())?)?;
        }
    }
    Ok(f)
}

fn alphabet_for(n: usize, names: &Option<Vec<String>>) -> Result<Alphabet> {
    match names {
        Some(ns) => {
            if ns.len() != n {
                return Err(Error::input(alloc::format!("{} names for {} intervals", ns.len(), n)));
            }
            Alphabet::new(ns.clone())
        }
        None if n <= 26 => Ok(Alphabet::standard(n)),
        None => Err(Error::input("more than 26 intervals need explicit names")),
    }
}

/// Each subinterval maps forward onto its exchanged position.
pub fn gen_iet(spec: &IetSpec) -> Result<IsometrySystem> {
    let m = spec.lengths.len();
    if m == 0 {
        return Err(Error::input("an interval exchange needs at least one interval"));
    }
    if spec.perm.len() != m {
        return Err(Error::input(alloc::format!(
            "permutation has {} entries for {} intervals",
            spec.perm.len(),
            m
        )));
    }
    let mut seen = vec![false; m];
    for &p in &spec.perm {
        if p == 0 || p > m || seen[p - 1] {
            return Err(Error::input("perm must be a permutation of 1..m"));
        }
        seen[p - 1] = true;
    }
    if spec.lengths.iter().any(|l| !l.is_positive()) {
        return Err(Error::input("interval lengths must be positive"));
    }
    let total = spec.lengths.iter().fold(Scalar::zero(), |acc, l| &acc + l);
    if total != spec.length {
        return Err(Error::input(alloc::format!(
            "interval lengths sum to {total}, not {}",
            spec.length
        )));
    }
    let field = field_of(spec.lengths.iter().chain([&spec.length]))?;
    let k = MetricTree::segment(spec.length.clone(), field)?;
    let alphabet = alphabet_for(m, &spec.names)?;
    let mut specs = Vec::with_capacity(m);
    let mut top = Scalar::zero();
    for i in 0..m {
        let mut bottom = Scalar::zero();
        for j in 0..m {
            if spec.perm[j] < spec.perm[i] {
                bottom = &bottom + &spec.lengths[j];
            }
        }
        let end = &top + &spec.lengths[i];
        specs.push(GeneratorSpec {
            name: alphabet.names()[i].clone(),
            domain: vec![k.edge_point(0, top.clone())?, k.edge_point(0, end.clone())?],
            images: vec![
                k.edge_point(0, bottom.clone())?,
                k.edge_point(0, &bottom + &spec.lengths[i])?,
            ],
        });
        top = end;
    }
    IsometrySystem::new(k, alphabet, specs)
}

/// One piece of an interval translation mapping: `[lo, hi] → [lo + shift, hi + shift]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub name: String,
    pub lo: Scalar,
    pub hi: Scalar,
    pub shift: Scalar,
}

/// Interval translations on `[0, length]`; images need not cover.
pub fn gen_itm(length: &Scalar, pieces: &[Translation]) -> Result<IsometrySystem> {
    if pieces.is_empty() {
        return Err(Error::input("an interval translation mapping needs at least one piece"));
    }
    if !length.is_positive() {
        return Err(Error::input("the interval must have positive length"));
    }
    let field = field_of(
        pieces
            .iter()
            .flat_map(|p| [&p.lo, &p.hi, &p.shift])
            .chain([length]),
    )?;
    let k = MetricTree::segment(length.clone(), field)?;
    let names: Vec<String> = pieces.iter().map(|p| p.name.clone()).collect();
    let alphabet = Alphabet::new(names)?;
    let mut specs = Vec::new();
    for p in pieces {
        if p.lo > p.hi || p.lo.is_negative() || &p.hi > length {
            return Err(Error::input(alloc::format!("domain of '{}' is not inside [0, {length}]", p.name)));
        }
        let (ilo, ihi) = (&p.lo + &p.shift, &p.hi + &p.shift);
        if ilo.is_negative() || &ihi > length {
            return Err(Error::input(alloc::format!(
                "image [{ilo}, {ihi}] of '{}' escapes [0, {length}]",
                p.name
            )));
        }
        let (domain, images) = if p.lo == p.hi {
            (vec![k.edge_point(0, p.lo.clone())?], vec![k.edge_point(0, ilo)?])
        } else {
            (
                vec![k.edge_point(0, p.lo.clone())?, k.edge_point(0, p.hi.clone())?],
                vec![k.edge_point(0, ilo)?, k.edge_point(0, ihi)?],
            )
        };
        specs.push(GeneratorSpec {
            name: p.name.clone(),
            domain,
            images,
        });
    }
    IsometrySystem::new(k, alphabet, specs)
}

/// Which of the two classical regimes the generator data fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Domains and images each tile `K`: an interval exchange, surface type.
    Surface,
    /// Images (or domains) fail to tile `K`: Levitt, thin or exotic type.
    Thin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegimeReport {
    pub domains_cover: bool,
    pub images_cover: bool,
    pub domains_disjoint: bool,
    pub images_disjoint: bool,
    pub regime: Regime,
}

pub fn regime(sys: &IsometrySystem) -> RegimeReport {
    let t = sys.tree();
    let doms: Vec<Subtree> = sys.generators().iter().map(|g| g.domain().clone()).collect();
    let imgs: Vec<Subtree> = sys.generators().iter().map(|g| g.image().clone()).collect();
    let r = RegimeReport {
        domains_cover: t.covers(&doms),
        images_cover: t.covers(&imgs),
        domains_disjoint: t.interiors_disjoint(&doms),
        images_disjoint: t.interiors_disjoint(&imgs),
        regime: Regime::Thin,
    };
    let surface = r.domains_cover && r.images_cover && r.domains_disjoint && r.images_disjoint;
    RegimeReport {
        regime: if surface { Regime::Surface } else { Regime::Thin },
        ..r
    }
}
