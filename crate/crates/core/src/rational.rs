//! Exact rationals used as the carrier of every realized order.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics if `den` is zero.
    pub fn new(num: i128, den: i128) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn int(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exponent of 2 in the (reduced) denominator.
    pub fn two_adic_denominator(&self) -> u32 {
        self.denom().trailing_zeros()
    }

    /// `max(|p|, q)`; the level of `p/q` in the diagonal enumeration.
    pub fn height(&self) -> i128 {
        self.numer().abs().max(self.denom())
    }

    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn midpoint(&self, other: &Rational) -> Rational {
        (*self + *other) / Rational::int(2)
    }

    /// `2^-n` for small `n`.
    pub fn pow2_inv(n: u32) -> Rational {
        Rational::new(1, 1i128 << n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<i128>().map(Rational::int).map_err(|_| err()),
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| err())?;
                let d: i128 = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rational::new(n, d))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The canonical diagonal enumeration of all rationals: level `h` lists the
/// rationals of height exactly `h` in increasing order.
#[derive(Debug, Clone)]
pub struct DiagonalRationals {
    level: i128,
    buffer: std::vec::IntoIter<Rational>,
}

impl DiagonalRationals {
    pub fn new() -> Self {
        DiagonalRationals {
            level: 0,
            buffer: Vec::new().into_iter(),
        }
    }

    pub fn level(&self) -> i128 {
        self.level
    }

    fn fill(&mut self) {
        self.level += 1;
        let h = self.level;
        let mut out = Vec::with_capacity(4 * h as usize + 2);
        // denominator exactly h, |numerator| <= h
        for p in -h..=h {
            if p.gcd(&h) == 1 {
                out.push(Rational::new(p, h));
            }
        }
        // |numerator| exactly h, denominator < h
        for q in 1..h {
            if h.gcd(&q) == 1 {
                out.push(Rational::new(h, q));
                out.push(Rational::new(-h, q));
            }
        }
        out.sort();
        self.buffer = out.into_iter();
    }
}

impl Default for DiagonalRationals {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for DiagonalRationals {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        loop {
            if let Some(r) = self.buffer.next() {
                return Some(r);
            }
            self.fill();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn lowest_terms_and_valuation() {
        let r = Rational::new(6, -8);
        assert_eq!((r.numer(), r.denom()), (-3, 4));
        assert_eq!(r.two_adic_denominator(), 2);
        assert_eq!(Rational::new(1, 3).two_adic_denominator(), 0);
    }

    #[test]
    fn parse_and_display() {
        let r: Rational = "3/4".parse().unwrap();
        assert_eq!(r.to_string(), "3/4");
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::int(-7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn diagonal_is_injective_and_levelled() {
        let first: Vec<_> = DiagonalRationals::new().take(5000).collect();
        let set: HashSet<_> = first.iter().collect();
        assert_eq!(set.len(), first.len());
        assert_eq!(&first[..3], &[Rational::int(-1), Rational::ZERO, Rational::ONE]);
        for w in first.windows(2) {
            assert!(w[0].height() <= w[1].height());
        }
    }
}
