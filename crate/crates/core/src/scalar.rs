//! Exact scalars: rationals and elements of a real quadratic field `Q(√d)`.
//!
//! Every length, offset and distance in the crate is a [`Scalar`]. A value is
//! stored as `a + b√d` with `a, b` rational. Rational values keep `b = 0` and
//! `d = 0`, so structural equality coincides with numeric equality. Mixing two
//! irrational values over different radicands is a contract violation and
//! panics; systems are validated to a single [`Field`] up front.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The number field all scalars of one system live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `Q(√d)` for a square-free `d > 1`.
    Quadratic(u32),
}

impl Field {
    pub fn quadratic(d: u32) -> Result<Self> {
        if d < 2 || !is_square_free(d) {
            return Err(Error::input(alloc::format!(
                "radicand {d} must be a square-free integer greater than 1"
            )));
        }
        Ok(Field::Quadratic(d))
    }

    pub fn radicand(&self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Quadratic(d) => *d,
        }
    }

    /// True if `x` is representable in this field.
    pub fn contains(&self, x: &Scalar) -> bool {
        x.radicand == 0 || x.radicand == self.radicand()
    }

    /// The smallest field containing both, if any.
    pub fn join(self, other: Field) -> Result<Field> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Ok(self),
            (Field::Quadratic(a), Field::Quadratic(b)) => Err(Error::input(alloc::format!(
                "scalars from Q(√{a}) and Q(√{b}) cannot be mixed"
            ))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("rational"),
            Field::Quadratic(d) => write!(f, "quad:{d}"),
        }
    }
}

fn is_square_free(d: u32) -> bool {
    let mut p = 2u32;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// An exact real number `rat + irr·√radicand`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    rat: BigRational,
    irr: BigRational,
    radicand: u32,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_ratio(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_ratio(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::from_ratio(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar {
            rat: r,
            irr: BigRational::zero(),
            radicand: 0,
        }
    }

    /// `a + b√d`. A zero `b` yields a plain rational.
    pub fn quadratic(a: BigRational, b: BigRational, d: u32) -> Self {
        if b.is_zero() || d == 0 {
            return Scalar::from_ratio(a);
        }
        Scalar {
            rat: a,
            irr: b,
            radicand: d,
        }
    }

    /// `√d` itself.
    pub fn sqrt_of(d: u32) -> Self {
        Scalar::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 0
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    /// Sign of the value: `-1`, `0` or `1`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.rat);
        if self.radicand == 0 {
            return sa;
        }
        let sb = sign_of(&self.irr);
        if sa >= 0 && sb >= 0 {
            return if sa == 0 && sb == 0 { 0 } else { 1 };
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        // opposite signs: compare a² with d·b²
        let a2 = &self.rat * &self.rat;
        let db2 = &self.irr * &self.irr * BigRational::from_integer(BigInt::from(self.radicand));
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn half(&self) -> Scalar {
        let two = BigRational::from_integer(BigInt::from(2));
        Scalar {
            rat: &self.rat / &two,
            irr: &self.irr / &two,
            radicand: self.radicand,
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn min_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Floating point approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.radicand == 0 {
            return a;
        }
        let b = self.irr.to_f64().unwrap_or(f64::NAN);
        a + b * libm_sqrt(self.radicand as f64)
    }

    /// Parses `"p/q"` or `"p"` as a rational.
    pub fn parse_rational(s: &str) -> Result<Scalar> {
        parse_ratio(s).map(Scalar::from_ratio)
    }

    /// Formats a rational as `"p/q"`; always includes the denominator.
    pub fn ratio_string(r: &BigRational) -> String {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }

    fn unify(&self, other: &Scalar) -> u32 {
        match (self.radicand, other.radicand) {
            (0, d) | (d, 0) => d,
            (a, b) if a == b => a,
            (a, b) => panic!("scalar radicand mismatch: √{a} vs √{b}"),
        }
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

// Newton iteration; core has no sqrt for f64 without std.
fn libm_sqrt(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut g = if x > 1.0 { x / 2.0 } else { 1.0 };
    for _ in 0..64 {
        let next = 0.5 * (g + x / g);
        if (next - g).abs() <= f64::EPSILON * next {
            return next;
        }
        g = next;
    }
    g
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::input(alloc::format!("malformed rational '{s}'"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::input(alloc::format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(p, q))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"p/q"` (rational) or `"p/q:r/s"` meaning `p/q + (r/s)·√d`
    /// with the radicand supplied later via [`Scalar::in_field`].
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => Scalar::parse_rational(s),
            Some(_) => Err(Error::input(alloc::format!(
                "'{s}' needs a quadratic field; use Scalar::parse_in"
            ))),
        }
    }
}

impl Scalar {
    /// Parses `"p/q"` or `"p/q:r/s"` (`a:b` meaning `a + b√d`) in `field`.
    pub fn parse_in(s: &str, field: Field) -> Result<Scalar> {
        match s.split_once(':') {
            None => Scalar::parse_rational(s),
            Some((a, b)) => {
                let d = field.radicand();
                let a = parse_ratio(a)?;
                let b = parse_ratio(b)?;
                if d == 0 && !b.is_zero() {
                    return Err(Error::input(alloc::format!(
                        "'{s}' has an irrational part but the field is rational"
                    )));
                }
                Ok(Scalar::quadratic(a, b, d))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &BigRational| {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                alloc::format!("{}/{}", r.numer(), r.denom())
            }
        };
        if self.radicand == 0 {
            return f.write_str(&show(&self.rat));
        }
        let b = &self.irr;
        let sign = if b.is_negative() { '-' } else { '+' };
        let babs = b.abs();
        let coeff = if babs.is_one() {
            String::new()
        } else {
            alloc::format!("{}*", show(&babs))
        };
        if self.rat.is_zero() {
            let lead = if b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{coeff}√{}", self.radicand)
        } else {
            write!(f, "{}{sign}{coeff}√{}", show(&self.rat), self.radicand)
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.radicand == 0 && other.radicand == 0 {
            return self.rat.cmp(&other.rat);
        }
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let d = self.unify(rhs);
        Scalar::quadratic(&self.rat + &rhs.rat, &self.irr + &rhs.irr, d)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let d = self.unify(rhs);
        Scalar::quadratic(&self.rat - &rhs.rat, &self.irr - &rhs.irr, d)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let d = self.unify(rhs);
        if d == 0 {
            return Scalar::from_ratio(&self.rat * &rhs.rat);
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.rat * &rhs.rat + &self.irr * &rhs.irr * dd;
        let b = &self.rat * &rhs.irr + &self.irr * &rhs.rat;
        Scalar::quadratic(a, b, d)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        let d = self.unify(rhs);
        if rhs.radicand == 0 {
            return Scalar::quadratic(&self.rat / &rhs.rat, &self.irr / &rhs.rat, d);
        }
        // multiply by the conjugate: (a - b√d) / (a² - d b²)
        let dd = BigRational::from_integer(BigInt::from(d));
        let norm = &rhs.rat * &rhs.rat - &rhs.irr * &rhs.irr * dd;
        let conj = Scalar::quadratic(rhs.rat.clone(), -rhs.irr.clone(), d);
        let num = self * &conj;
        Scalar::quadratic(&num.rat / &norm, &num.irr / &norm, d)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            rat: -self.rat.clone(),
            irr: -self.irr.clone(),
            radicand: self.radicand,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// The golden-ratio conjugate `α = (√5 − 1)/2`, root of `α² + α − 1 = 0`.
pub fn golden_alpha() -> Scalar {
    Scalar::quadratic(
        BigRational::new(BigInt::from(-1), BigInt::from(2)),
        BigRational::new(BigInt::from(1), BigInt::from(2)),
        5,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_alpha_identities() {
        let a = golden_alpha();
        let a2 = &a * &a;
        assert_eq!(&a2 + &a, Scalar::one());
        assert_eq!(a2, Scalar::one() - &a);
        assert!(a.is_positive());
        assert!(a < Scalar::one());
        assert!(Scalar::ratio(61, 100) < a && a < Scalar::ratio(62, 100));
    }

    #[test]
    fn sign_analysis_covers_mixed_signs() {
        let d = 5;
        let q = |a: i64, b: i64| {
            Scalar::quadratic(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d)
        };
        assert_eq!(q(3, -1).signum(), 1); // 3 - 2.236
        assert_eq!(q(2, -1).signum(), -1); // 2 - 2.236
        assert_eq!(q(-3, 1).signum(), -1);
        assert_eq!(q(-2, 1).signum(), 1);
        assert_eq!(q(0, 0).signum(), 0);
    }

    #[test]
    fn division_roundtrip() {
        let a = golden_alpha();
        let x = Scalar::ratio(3, 7) + &a;
        let y = &x / &a;
        assert_eq!(&y * &a, x);
    }

    #[test]
    fn zero_irrational_part_is_rational() {
        let x = Scalar::quadratic(BigRational::new(1.into(), 3.into()), BigRational::zero(), 5);
        assert_eq!(x, Scalar::ratio(1, 3));
        assert!(x.is_rational());
    }

    #[test]
    fn parsing() {
        assert_eq!(Scalar::parse_rational("6/4").unwrap(), Scalar::ratio(3, 2));
        assert_eq!(Scalar::parse_rational("-2").unwrap(), Scalar::from_int(-2));
        assert!(Scalar::parse_rational("1/0").is_err());
        assert!(Scalar::parse_rational("x").is_err());
        let f = Field::quadratic(5).unwrap();
        assert_eq!(Scalar::parse_in("-1/2:1/2", f).unwrap(), golden_alpha());
        assert!(Scalar::parse_in("0:1", Field::Rational).is_err());
        assert!(Field::quadratic(8).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Scalar::ratio(1, 3).to_string(), "1/3");
        assert_eq!(golden_alpha().to_string(), "-1/2+1/2*√5");
        assert_eq!(Scalar::sqrt_of(5).to_string(), "√5");
    }
}
