//! Exact points on the circle at infinity: reduced fractions plus infinity.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A point of the boundary circle, stored as a reduced fraction `p/q`
/// with `q >= 0`. Infinity is `1/0`. The representation is canonical,
/// so derived equality and hashing are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    p: i64,
    q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rational {
    /// Build the canonical reduced form of `p/q`. Fails only on `0/0`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::ZeroOverZero);
        }
        if q == 0 {
            return Ok(Rational { p: 1, q: 0 });
        }
        let g = gcd(p, q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = p.checked_neg().ok_or(Error::Overflow("negating numerator"))?;
            q = -q;
        }
        Ok(Rational { p, q })
    }

    pub fn infinity() -> Self {
        Rational { p: 1, q: 0 }
    }

    pub fn zero() -> Self {
        Rational { p: 0, q: 1 }
    }

    pub fn integer(n: i64) -> Self {
        Rational { p: n, q: 1 }
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn numer(&self) -> i64 {
        self.p
    }

    pub fn denom(&self) -> i64 {
        self.q
    }

    /// `p1 q2 - p2 q1`, exact in 128 bits. Zero iff the points coincide.
    pub fn det(&self, other: &Rational) -> i128 {
        self.p as i128 * other.q as i128 - other.p as i128 * self.q as i128
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    /// Value order on the extended line: finite points by value, infinity
    /// strictly above everything. Cross-multiplication is valid because
    /// denominators are canonically nonnegative.
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.p as i128 * other.q as i128;
        let rhs = other.p as i128 * self.q as i128;
        lhs.cmp(&rhs)
    }
}

/// True iff `x`, `y`, `z` occur in counterclockwise order around the circle,
/// where the circle is the extended line traversed in increasing value order
/// with infinity at the top.
pub fn ccw(x: Rational, y: Rational, z: Rational) -> bool {
    (x < y && y < z) || (y < z && z < x) || (z < x && x < y)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "oo" {
            return Ok(Rational::infinity());
        }
        let parse_int =
            |t: &str| -> Result<i64> { t.parse().map_err(|_| Error::RationalParse(s.into())) };
        match s.split_once('/') {
            Some((a, b)) => Rational::new(parse_int(a)?, parse_int(b)?),
            None => Ok(Rational::integer(parse_int(s)?)),
        }
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(-3, -6), r(1, 2));
        assert_eq!(r(3, -6), r(-1, 2));
        assert_eq!(r(-5, 0), Rational::infinity());
        assert_eq!(r(7, 0), Rational::infinity());
        assert_eq!(r(0, -9), Rational::zero());
        assert!(Rational::new(0, 0).is_err());
    }

    #[test]
    fn value_order_puts_infinity_on_top() {
        let pts = [r(-3, 1), r(-1, 2), Rational::zero(), r(1, 3), r(1, 2), r(5, 2), Rational::infinity()];
        for w in pts.windows(2) {
            assert!(w[0] < w[1], "{} < {} failed", w[0], w[1]);
        }
        assert_eq!(Rational::infinity().cmp(&Rational::infinity()), Ordering::Equal);
    }

    #[test]
    fn ccw_is_cyclic_and_antisymmetric() {
        let (a, b, c) = (Rational::zero(), r(1, 1), Rational::infinity());
        assert!(ccw(a, b, c));
        assert!(ccw(b, c, a));
        assert!(ccw(c, a, b));
        assert!(!ccw(b, a, c));
        assert!(!ccw(a, c, b));
        // degenerate triples are not counterclockwise
        assert!(!ccw(a, a, b));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "1", "-3", "1/2", "-7/3", "1/0"] {
            let x: Rational = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            let y: Rational = x.to_string().parse().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!("inf".parse::<Rational>().unwrap(), Rational::infinity());
        assert_eq!("4/6".parse::<Rational>().unwrap(), r(2, 3));
        assert!("a/b".parse::<Rational>().is_err());
        assert!("0/0".parse::<Rational>().is_err());
    }

    #[test]
    fn det_detects_equality_and_unimodularity() {
        assert_eq!(Rational::zero().det(&Rational::infinity()), -1);
        assert_eq!(r(1, 2).det(&r(1, 3)), 1);
        assert_eq!(r(2, 3).det(&r(2, 3)), 0);
    }
}
