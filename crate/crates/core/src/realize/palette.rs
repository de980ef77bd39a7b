use num_integer::Integer;

use super::Span;
use crate::rational::Rational;

/// Partition of the rationals into classes by the exponent `v` of 2 in the
/// reduced denominator. Every class is topologically dense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Palette {
    /// Class `v mod k`.
    Modulo(u32),
    /// Class `min(v, bound)`; `bound + 1` classes.
    Capped(u32),
}

/// Denominators searched exhaustively before falling back to the
/// constructive witness.
const EXHAUSTIVE_DENOMINATORS: i128 = 1 << 15;

impl Palette {
    pub fn classes(&self) -> u32 {
        match *self {
            Palette::Modulo(k) => k,
            Palette::Capped(b) => b + 1,
        }
    }

    pub fn class_of_valuation(&self, v: u32) -> u32 {
        match *self {
            Palette::Modulo(k) => v % k,
            Palette::Capped(b) => v.min(b),
        }
    }

    pub fn class_of(&self, x: &Rational) -> u32 {
        self.class_of_valuation(x.two_adic_denominator())
    }
}

/// The least-denominator rational in the open span whose class is allowed
/// (ties go to the smaller value). Unbounded spans are searched in a unit
/// window at their finite end, or `(-1, 1)` when both ends are open.
///
/// Completeness: if `2^v * 3^j * len > 6` for an allowed valuation `v`,
/// some `p ≡ 1 (mod 6)` gives the element `p / (2^v 3^j)` of that class, so
/// the search always terminates with a witness when any class is allowed.
pub fn least_denominator(span: &Span, palette: Palette, allowed: &[bool]) -> Option<Rational> {
    if span.is_empty() || !allowed.iter().any(|&a| a) {
        return None;
    }
    let (lo, hi) = match (span.lo, span.hi) {
        (Some(l), Some(h)) => (l, h),
        (Some(l), None) => (l, l + Rational::ONE),
        (None, Some(h)) => (h - Rational::ONE, h),
        (None, None) => (-Rational::ONE, Rational::ONE),
    };
    let len = hi - lo;
    let ok = |v: u32| allowed[palette.class_of_valuation(v) as usize];

    let v0 = (0..=palette.classes() + 1).find(|&v| ok(v))?;
    let mut fallback = 1i128 << v0;
    while Rational::int(fallback) * len <= Rational::int(6) {
        fallback *= 3;
    }

    for d in 1..=fallback.min(EXHAUSTIVE_DENOMINATORS) {
        if !ok(d.trailing_zeros()) {
            continue;
        }
        let first = (lo * Rational::int(d)).floor() + 1;
        let last = (hi * Rational::int(d)).ceil() - 1;
        let mut p = first;
        while p <= last {
            if p.gcd(&d) == 1 {
                return Some(Rational::new(p, d));
            }
            p += 1;
        }
    }

    // p ≡ 1 (mod 6) is coprime to 2^v0 3^j
    let d = fallback;
    let mut p = (lo * Rational::int(d)).floor() + 1;
    p += (1 - p).rem_euclid(6);
    let x = Rational::new(p, d);
    debug_assert!(lo < x && x < hi && ok(x.two_adic_denominator()));
    Some(x)
}
