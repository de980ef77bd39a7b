use std::cmp::Ordering;

use super::{RealizedOrder, Span};
use crate::rational::Rational;
use crate::structure::{Color, OrderedStructure, Query, WitnessError};

/// An equivalence relation on a carrier whose classes are order-convex.
pub trait ConvexEquivalence {
    fn same_class(&self, a: &Rational, b: &Rational) -> bool;

    /// Closed bounds (`None` = unbounded) of an interval containing the
    /// class of `a`.
    fn class_bounds(&self, a: &Rational) -> (Option<Rational>, Option<Rational>);
}

impl<F, G> ConvexEquivalence for (F, G)
where
    F: Fn(&Rational, &Rational) -> bool,
    G: Fn(&Rational) -> (Option<Rational>, Option<Rational>),
{
    fn same_class(&self, a: &Rational, b: &Rational) -> bool {
        (self.0)(a, b)
    }
    fn class_bounds(&self, a: &Rational) -> (Option<Rational>, Option<Rational>) {
        (self.1)(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("class of {a} and {b} is not convex: {between} lies between them in another class")]
    NonConvex {
        a: Rational,
        b: Rational,
        between: Rational,
    },
    #[error("class bounds of {0} exclude a member of its class")]
    UnsoundBounds(Rational),
}

/// The order of classes of a convex equivalence, each class represented by
/// its least enumerated member. Colors are inherited from representatives.
pub struct QuotientOrder<'a, E> {
    base: &'a RealizedOrder,
    equiv: E,
}

impl<'a, E: ConvexEquivalence> QuotientOrder<'a, E> {
    /// Builds the quotient after checking the oracle on the first `depth`
    /// enumerated elements: classes must be convex and bounds sound.
    pub fn new(base: &'a RealizedOrder, equiv: E, depth: usize) -> Result<Self, QuotientError> {
        let sample = base.enumerate(depth);
        for a in &sample {
            let (lo, hi) = equiv.class_bounds(a);
            for b in &sample {
                if !equiv.same_class(a, b) {
                    continue;
                }
                if lo.is_some_and(|l| *b < l) || hi.is_some_and(|h| *b > h) {
                    return Err(QuotientError::UnsoundBounds(*a));
                }
                if a >= b {
                    continue;
                }
                if let Some(z) = sample.iter().find(|z| *a < **z && **z < *b && !equiv.same_class(a, z)) {
                    return Err(QuotientError::NonConvex {
                        a: *a,
                        b: *b,
                        between: *z,
                    });
                }
            }
        }
        Ok(QuotientOrder { base, equiv })
    }

    /// The least enumerated member of the class of `x`.
    pub fn representative(&self, x: &Rational) -> Rational {
        self.base
            .iter()
            .find(|y| self.equiv.same_class(x, y))
            .expect("x is enumerated eventually")
    }

    /// Representatives of the classes met by the first `n` base elements,
    /// in order of discovery.
    pub fn classes_among(&self, n: usize) -> Vec<Rational> {
        let mut reps: Vec<Rational> = Vec::new();
        for y in self.base.iter().take(n) {
            if !reps.iter().any(|r| self.equiv.same_class(r, &y)) {
                reps.push(y);
            }
        }
        reps
    }
}

impl<E: ConvexEquivalence> OrderedStructure for QuotientOrder<'_, E> {
    type Elem = Rational;

    fn compare(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }

    fn color(&self, a: &Rational) -> Color {
        self.base.color(a)
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Rational> + '_> {
        let mut reps: Vec<Rational> = Vec::new();
        Box::new(self.base.iter().filter(move |y| {
            if reps.iter().any(|r| self.equiv.same_class(r, y)) {
                false
            } else {
                reps.push(*y);
                true
            }
        }))
    }

    /// Complete for color-free queries; with a color, the class found may
    /// be represented by an element of another color, which is reported as
    /// an incomplete search.
    fn witness(&self, q: &Query<'_, Rational>) -> Result<Option<Rational>, WitnessError> {
        let lower = q.lower.and_then(|l| self.equiv.class_bounds(l).1.or(Some(*l)));
        let upper = q.upper.and_then(|u| self.equiv.class_bounds(u).0.or(Some(*u)));
        let gap = Span { lo: lower, hi: upper };
        if gap.is_empty() {
            return Ok(None);
        }
        let inner = Query::between(gap.lo.as_ref(), gap.hi.as_ref()).maybe_color(q.color);
        let Some(z) = self.base.witness(&inner)? else {
            return Ok(None);
        };
        let rep = self.representative(&z);
        if q.color.is_some_and(|c| self.color(&rep) != c) {
            return Err(WitnessError::Incomplete(format!(
                "class of {z} is represented by {rep} of another color"
            )));
        }
        Ok(Some(rep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::{Palette, Piece};
    use crate::structure::Region;

    fn unit_interval(lo: i128, hi: i128) -> RealizedOrder {
        RealizedOrder::from_pieces(vec![Piece::dense(
            Span::open(Rational::int(lo), Rational::int(hi)),
            Palette::Modulo(1),
            vec![Some(Color(0))],
            Region(0, 0),
        )])
    }

    #[test]
    fn identity_quotient_keeps_enumeration() {
        let m = RealizedOrder::dense_partition(2).unwrap();
        let eq = (|a: &Rational, b: &Rational| a == b, |a: &Rational| (Some(*a), Some(*a)));
        let q = QuotientOrder::new(&m, eq, 200).unwrap();
        assert_eq!(q.enumerate(300), m.enumerate(300));
    }

    #[test]
    fn floor_classes_on_zero_three() {
        let m = unit_interval(0, 3);
        let eq = (
            |a: &Rational, b: &Rational| a.floor() == b.floor(),
            |a: &Rational| (Some(Rational::int(a.floor())), Some(Rational::int(a.floor() + 1))),
        );
        let q = QuotientOrder::new(&m, eq, 300).unwrap();
        let mut reps = q.classes_among(5000);
        reps.sort();
        assert_eq!(reps.len(), 3);
        assert_eq!(reps, vec![Rational::new(1, 2), Rational::ONE, Rational::int(2)]);
        // nothing strictly between consecutive classes
        assert_eq!(q.witness(&Query::between(Some(&reps[0]), Some(&reps[1]))), Ok(None));
    }

    #[test]
    fn non_convex_oracle_is_rejected() {
        let m = unit_interval(0, 3);
        let eq = (
            |a: &Rational, b: &Rational| (a.floor() % 2) == (b.floor() % 2),
            |_: &Rational| (None, None),
        );
        assert!(matches!(
            QuotientOrder::new(&m, eq, 100),
            Err(QuotientError::NonConvex { .. })
        ));
    }

    /// Collapsing [0, 1] to a single class keeps the quotient dense.
    #[test]
    fn dense_quotient_is_dense() {
        let m = RealizedOrder::dense_partition(3).unwrap();
        let unit = |x: &Rational| Rational::ZERO <= *x && *x <= Rational::ONE;
        let eq = (
            move |a: &Rational, b: &Rational| a == b || (unit(a) && unit(b)),
            move |a: &Rational| {
                if unit(a) {
                    (Some(Rational::ZERO), Some(Rational::ONE))
                } else {
                    (Some(*a), Some(*a))
                }
            },
        );
        let q = QuotientOrder::new(&m, eq, 100).unwrap();
        let reps = q.enumerate(21);
        assert_eq!(reps.iter().filter(|x| unit(x)).count(), 1);
        let mut checked = 0;
        for a in &reps {
            for b in &reps {
                if a < b && checked < 200 {
                    let w = q.witness(&Query::between(Some(a), Some(b))).unwrap().unwrap();
                    assert!(a < &w && &w < b);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 200);
    }
}
