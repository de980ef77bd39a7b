//! Concrete countable colored orders carried by exact rationals.
//!
//! A [`RealizedOrder`] is a finite list of disjoint [`Piece`]s. Every piece
//! kind has a closed-form membership test and a complete witness solver, so
//! existence questions ("is there an element of color `c` strictly between
//! `a` and `b`?") are decided from the shape of the order rather than by
//! bounded search.

mod palette;
mod quotient;
mod spec;

pub use palette::{least_denominator, Palette};
pub use quotient::{ConvexEquivalence, QuotientError, QuotientOrder};
pub use spec::{realize_spec, realize_spec_variant, Block, ColoredOrderSpec, SpecError};

use std::cmp::Ordering;

use num_integer::Integer;

use crate::rational::Rational;
use crate::structure::{Color, OrderedStructure, Query, Region, WitnessError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RealizeError {
    #[error("a dense partition needs at least one color")]
    ZeroColors,
    #[error("{0} is not in the carrier")]
    NotInCarrier(Rational),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// An open interval; `None` bounds are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Span {
    pub const ALL: Span = Span { lo: None, hi: None };

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Span {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn above(lo: Rational) -> Self {
        Span { lo: Some(lo), hi: None }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.is_none_or(|l| l < *x) && self.hi.is_none_or(|h| *x < h)
    }

    pub fn intersect(&self, other: &Span) -> Span {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Span { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l >= h)
    }
}

/// Layout of an ω-sequence of consecutive open convex rungs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RungLayout {
    /// Rung `n` is `(o - 1/(n+1), o - 1/(n+2))`; the ladder spans `(o-1, o)`.
    Harmonic { origin: Rational },
    /// Rung `n` is `(o + w(1 - 2^-n), o + w(1 - 2^-(n+1)))`; spans `(o, o+w)`.
    Geometric { origin: Rational, width: Rational },
}

const MAX_RUNG: u32 = 120;

impl RungLayout {
    pub fn span(&self) -> Span {
        match *self {
            RungLayout::Harmonic { origin } => Span::open(origin - Rational::ONE, origin),
            RungLayout::Geometric { origin, width } => Span::open(origin, origin + width),
        }
    }

    /// Left boundary of rung `n` (not itself an element).
    pub fn boundary(&self, n: u32) -> Rational {
        match *self {
            RungLayout::Harmonic { origin } => origin - Rational::new(1, n as i128 + 1),
            RungLayout::Geometric { origin, width } => origin + width * (Rational::ONE - Rational::pow2_inv(n)),
        }
    }

    pub fn rung(&self, n: u32) -> Span {
        Span::open(self.boundary(n), self.boundary(n + 1))
    }

    /// The rung whose closure's left part contains `x`: `Ok(n)` if `x` lies
    /// strictly inside rung `n`, `Err(n)` if `x` is the left boundary of rung `n`.
    pub fn locate(&self, x: &Rational) -> Option<Result<u32, u32>> {
        if !self.span().contains(x) && Some(*x) != self.span().lo {
            return None;
        }
        if Some(*x) == self.span().lo {
            return Some(Err(0));
        }
        // rungs are few and increasing; a linear walk is enough
        let mut n = 0;
        while n < MAX_RUNG {
            let b = self.boundary(n + 1);
            match x.cmp(&b) {
                Ordering::Less => return Some(Ok(n)),
                Ordering::Equal => return Some(Err(n + 1)),
                Ordering::Greater => n += 1,
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Point {
        at: Rational,
        color: Color,
        region: Region,
        /// Whether the point is definable (an endpoint of a convex piece).
        landmark: bool,
    },
    /// All rationals of `span` whose palette class has a color.
    Dense {
        span: Span,
        palette: Palette,
        colors: Vec<Option<Color>>,
        region: Region,
    },
    /// An ω-sequence of open convex rungs; rung `n`, class `c` carries color
    /// `class_base[c] + n * rung_stride`. The rung index is the region minor.
    Ladder {
        layout: RungLayout,
        palette: Palette,
        class_base: Vec<Option<u64>>,
        rung_stride: u64,
        region_major: u64,
    },
    /// `{start + k * step | k in Z}`, a discrete order.
    Progression {
        start: Rational,
        step: Rational,
        color: Color,
        region: Region,
    },
}

impl Piece {
    pub fn dense(span: Span, palette: Palette, colors: Vec<Option<Color>>, region: Region) -> Self {
        Piece::Dense {
            span,
            palette,
            colors,
            region,
        }
    }

    pub fn point(at: Rational, color: Color, region: Region, landmark: bool) -> Self {
        Piece::Point {
            at,
            color,
            region,
            landmark,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Piece::Point { at, .. } => Span {
                lo: Some(*at),
                hi: Some(*at),
            },
            Piece::Dense { span, .. } => *span,
            Piece::Ladder { layout, .. } => layout.span(),
            Piece::Progression { .. } => Span::ALL,
        }
    }

    /// Color and region of `x` if it belongs to this piece.
    pub fn classify(&self, x: &Rational) -> Option<(Color, Region)> {
        match self {
            Piece::Point { at, color, region, .. } => (at == x).then_some((*color, *region)),
            Piece::Dense {
                span,
                palette,
                colors,
                region,
            } => {
                if !span.contains(x) {
                    return None;
                }
                colors[palette.class_of(x) as usize].map(|c| (c, *region))
            }
            Piece::Ladder {
                layout,
                palette,
                class_base,
                rung_stride,
                region_major,
            } => {
                let n = layout.locate(x)?.ok()?;
                let base = class_base[palette.class_of(x) as usize]?;
                Some((Color(base + n as u64 * rung_stride), Region(*region_major, n as u64)))
            }
            Piece::Progression {
                start,
                step,
                color,
                region,
            } => ((*x - *start) / *step).is_integer().then_some((*color, *region)),
        }
    }

    /// Whether some element of this piece can have a reduced denominator
    /// with 2-adic valuation `v`.
    fn admits_valuation(&self, v: u32) -> bool {
        match self {
            Piece::Point { at, .. } => at.two_adic_denominator() == v,
            Piece::Dense { palette, colors, .. } => colors[palette.class_of_valuation(v) as usize].is_some(),
            Piece::Ladder {
                palette, class_base, ..
            } => class_base[palette.class_of_valuation(v) as usize].is_some(),
            Piece::Progression { .. } => true,
        }
    }

    fn is_finite(&self) -> bool {
        matches!(self, Piece::Point { .. })
    }

    fn witness(
        &self,
        lower: Option<&Rational>,
        upper: Option<&Rational>,
        color: Option<Color>,
        region: Option<Region>,
    ) -> Option<Rational> {
        let query = Span {
            lo: lower.copied(),
            hi: upper.copied(),
        };
        match self {
            Piece::Point {
                at,
                color: c,
                region: r,
                ..
            } => {
                let ok =
                    query.contains(at) && color.is_none_or(|want| want == *c) && region.is_none_or(|want| want == *r);
                ok.then_some(*at)
            }
            Piece::Dense {
                span,
                palette,
                colors,
                region: r,
            } => {
                if region.is_some_and(|want| want != *r) {
                    return None;
                }
                let allowed: Vec<bool> = colors
                    .iter()
                    .map(|c| c.is_some_and(|c| color.is_none_or(|want| want == c)))
                    .collect();
                least_denominator(&span.intersect(&query), *palette, &allowed)
            }
            Piece::Ladder {
                layout,
                palette,
                class_base,
                rung_stride,
                region_major,
            } => {
                let rung_wanted = match region {
                    Some(Region(major, minor)) if major == *region_major => Some(minor as u32),
                    Some(_) => return None,
                    None => None,
                };
                let search =
                    |n: u32, allowed: &[bool]| least_denominator(&layout.rung(n).intersect(&query), *palette, allowed);
                match color {
                    Some(want) => {
                        for (c, base) in class_base.iter().enumerate() {
                            let Some(base) = *base else { continue };
                            if want.0 < base || want.is_blank() {
                                continue;
                            }
                            let off = want.0 - base;
                            let n = if *rung_stride == 0 {
                                if off != 0 {
                                    continue;
                                }
                                match rung_wanted {
                                    Some(n) => n,
                                    None => {
                                        return self.first_rung_witness(&query, |n| {
                                            let mut allowed = vec![false; class_base.len()];
                                            allowed[c] = true;
                                            search(n, &allowed)
                                        })
                                    }
                                }
                            } else {
                                if off % rung_stride != 0 {
                                    continue;
                                }
                                (off / rung_stride) as u32
                            };
                            if rung_wanted.is_some_and(|r| r != n) || n > MAX_RUNG {
                                continue;
                            }
                            let mut allowed = vec![false; class_base.len()];
                            allowed[c] = true;
                            if let Some(x) = search(n, &allowed) {
                                return Some(x);
                            }
                        }
                        None
                    }
                    None => {
                        let allowed: Vec<bool> = class_base.iter().map(Option::is_some).collect();
                        match rung_wanted {
                            Some(n) => search(n, &allowed),
                            None => self.first_rung_witness(&query, |n| search(n, &allowed)),
                        }
                    }
                }
            }
            Piece::Progression {
                start,
                step,
                color: c,
                region: r,
            } => {
                if color.is_some_and(|w| w != *c) || region.is_some_and(|w| w != *r) {
                    return None;
                }
                let k = match (lower, upper) {
                    (Some(l), _) => ((*l - *start) / *step).floor() + 1,
                    (None, Some(u)) => ((*u - *start) / *step).ceil() - 1,
                    (None, None) => 0,
                };
                let x = *start + *step * Rational::int(k);
                query.contains(&x).then_some(x)
            }
        }
    }

    /// Witness in the first rung of a ladder that meets `query`.
    fn first_rung_witness(&self, query: &Span, search: impl Fn(u32) -> Option<Rational>) -> Option<Rational> {
        let Piece::Ladder { layout, .. } = self else {
            return None;
        };
        let span = layout.span();
        let start = match query.lo {
            None => 0,
            Some(l) if Some(l) <= span.lo => 0,
            Some(l) => match layout.locate(&l)? {
                Ok(n) | Err(n) => n,
            },
        };
        if query.hi.is_some_and(|h| h <= layout.boundary(start)) {
            return None;
        }
        search(start)
    }
}

/// A countable colored order over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedOrder {
    pieces: Vec<Piece>,
    spec: Option<ColoredOrderSpec>,
    size: Option<usize>,
}

/// Constraint for [`RealizedOrder::find_witness`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Constraint {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub color: Option<Color>,
}

impl RealizedOrder {
    /// Pieces must be pairwise disjoint.
    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        let size = pieces.iter().all(Piece::is_finite).then_some(pieces.len());
        RealizedOrder {
            pieces,
            spec: None,
            size,
        }
    }

    pub(crate) fn with_spec(mut self, spec: ColoredOrderSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The spec this order was realized from, if any.
    pub fn spec(&self) -> Option<&ColoredOrderSpec> {
        self.spec.as_ref()
    }

    /// Number of elements when the carrier is finite.
    pub fn finite_size(&self) -> Option<usize> {
        self.size
    }

    pub fn locate(&self, x: &Rational) -> Option<(Color, Region)> {
        self.pieces.iter().find_map(|p| p.classify(x))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.locate(x).is_some()
    }

    /// Color of a carrier element; `None` off the carrier.
    pub fn color_of(&self, x: &Rational) -> Option<Color> {
        self.locate(x).map(|(c, _)| c)
    }

    /// The first `n` elements of the canonical enumeration, with colors.
    pub fn enumerate_colored(&self, n: usize) -> Vec<(Rational, Color)> {
        self.iter()
            .take(n)
            .map(|x| {
                let c = self.color_of(&x).expect("enumerated element is in the carrier");
                (x, c)
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Rational> + '_ {
        let cap = self.size.unwrap_or(usize::MAX);
        CarrierIter::new(self).take(cap)
    }

    /// The least element, if the carrier has one.
    pub fn minimum(&self) -> Option<Rational> {
        self.extreme(false)
    }

    /// The greatest element, if the carrier has one.
    pub fn maximum(&self) -> Option<Rational> {
        self.extreme(true)
    }

    fn extreme(&self, upward: bool) -> Option<Rational> {
        // only isolated points can be extreme: dense spans and rungs are open
        self.pieces.iter().find_map(|p| match p {
            Piece::Point { at, .. } => {
                let q = if upward {
                    Query::between(Some(at), None)
                } else {
                    Query::between(None, Some(at))
                };
                matches!(self.witness(&q), Ok(None)).then_some(*at)
            }
            _ => None,
        })
    }

    /// All colors carried by some element.
    pub fn palette(&self) -> Vec<Color> {
        let mut out = Vec::new();
        for p in &self.pieces {
            match p {
                Piece::Point { color, .. } | Piece::Progression { color, .. } => out.push(*color),
                Piece::Dense { span, colors, .. } if !span.is_empty() => out.extend(colors.iter().flatten()),
                Piece::Dense { .. } => {}
                Piece::Ladder { .. } => {} // infinite palette, queried lazily
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Complete witness search: a carrier element strictly inside the
    /// interval with the requested color, or `None` if there is none.
    /// Ties are broken towards the least denominator, then the least value.
    pub fn find_witness(&self, c: &Constraint) -> Result<Option<Rational>, RealizeError> {
        let q = Query::between(c.lower.as_ref(), c.upper.as_ref()).maybe_color(c.color);
        Ok(self.witness(&q)?)
    }

    /// Restricts point and dense pieces to `span`; a ladder is kept whole
    /// when it meets `span`, and a progression is kept whole.
    pub fn restrict_span(&self, span: Span) -> RealizedOrder {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Point { at, .. } => {
                    let closed = span.lo.is_none_or(|l| l <= *at) && span.hi.is_none_or(|h| *at <= h);
                    (closed && (span.contains(at) || span.lo == Some(*at) || span.hi == Some(*at))).then(|| p.clone())
                }
                Piece::Dense {
                    span: s,
                    palette,
                    colors,
                    region,
                } => {
                    let s = s.intersect(&span);
                    (!s.is_empty()).then(|| Piece::dense(s, *palette, colors.clone(), *region))
                }
                // ladders are kept whole when they meet the span
                Piece::Ladder { layout, .. } => (!layout.span().intersect(&span).is_empty()).then(|| p.clone()),
                Piece::Progression { .. } => Some(p.clone()),
            })
            .collect();
        RealizedOrder::from_pieces(pieces)
    }

    /// Keeps only elements whose color is in `keep`.
    pub fn restrict_colors(&self, keep: &[Color]) -> RealizedOrder {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Point { color, .. } | Piece::Progression { color, .. } => {
                    keep.contains(color).then(|| p.clone())
                }
                Piece::Dense {
                    span,
                    palette,
                    colors,
                    region,
                } => {
                    let colors: Vec<_> = colors.iter().map(|c| c.filter(|c| keep.contains(c))).collect();
                    colors
                        .iter()
                        .any(Option::is_some)
                        .then(|| Piece::dense(*span, *palette, colors, *region))
                }
                Piece::Ladder { .. } => Some(p.clone()),
            })
            .collect();
        RealizedOrder::from_pieces(pieces)
    }

    /// `(0, 1)`-style dense partition of all rationals into `k` colors by
    /// the exponent of 2 in the denominator, taken modulo `k`.
    pub fn dense_partition(k: u32) -> Result<RealizedOrder, RealizeError> {
        if k == 0 {
            return Err(RealizeError::ZeroColors);
        }
        Ok(Self::partition_with(Palette::Modulo(k)))
    }

    /// The ω-truncation: color `min(v, bound)`.
    pub fn dense_partition_truncated(bound: u32) -> RealizedOrder {
        Self::partition_with(Palette::Capped(bound))
    }

    fn partition_with(palette: Palette) -> RealizedOrder {
        let colors = (0..palette.classes()).map(|c| Some(Color(c as u64))).collect();
        RealizedOrder::from_pieces(vec![Piece::dense(Span::ALL, palette, colors, Region(0, 0))])
    }
}

impl OrderedStructure for RealizedOrder {
    type Elem = Rational;

    fn compare(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }

    fn color(&self, a: &Rational) -> Color {
        self.color_of(a).unwrap_or(Color::BLANK)
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Rational> + '_> {
        Box::new(self.iter())
    }

    fn witness(&self, q: &Query<'_, Rational>) -> Result<Option<Rational>, WitnessError> {
        if let (Some(l), Some(u)) = (q.lower, q.upper) {
            if l >= u {
                return Err(WitnessError::MalformedInterval {
                    lower: l.to_string(),
                    upper: u.to_string(),
                });
            }
        }
        Ok(self
            .pieces
            .iter()
            .filter_map(|p| p.witness(q.lower, q.upper, q.color, q.region))
            .min_by(|a, b| a.denom().cmp(&b.denom()).then(a.cmp(b))))
    }

    fn region(&self, a: &Rational) -> Option<Region> {
        self.locate(a).map(|(_, r)| r)
    }

    fn landmarks(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Point { at, landmark: true, .. } => Some(*at),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }
}

/// The diagonal enumeration filtered by the carrier. Each level only
/// visits candidates inside the hull of the pieces whose denominators have
/// a 2-adic valuation some piece can carry; the order is unchanged.
struct CarrierIter<'a> {
    order: &'a RealizedOrder,
    lo: Option<Rational>,
    hi: Option<Rational>,
    valuations: [bool; 128],
    level: i128,
    buffer: std::vec::IntoIter<Rational>,
    empty: bool,
}

impl<'a> CarrierIter<'a> {
    fn new(order: &'a RealizedOrder) -> Self {
        let live: Vec<&Piece> = order
            .pieces
            .iter()
            .filter(|p| !p.span().is_empty() || p.is_finite())
            .collect();
        let mut valuations = [false; 128];
        for (v, slot) in valuations.iter_mut().enumerate() {
            *slot = live.iter().any(|p| p.admits_valuation(v as u32));
        }
        let bound = |f: fn(&Span) -> Option<Rational>, pick: fn(Rational, Rational) -> Rational| {
            let mut out: Option<Rational> = None;
            for p in &live {
                let b = f(&p.span())?;
                out = Some(out.map_or(b, |o| pick(o, b)));
            }
            out
        };
        CarrierIter {
            order,
            lo: bound(|s| s.lo, Rational::min),
            hi: bound(|s| s.hi, Rational::max),
            valuations,
            level: 0,
            buffer: Vec::new().into_iter(),
            empty: live.is_empty() || !valuations.iter().any(|&v| v),
        }
    }

    fn admits(&self, n: i128) -> bool {
        self.valuations[n.trailing_zeros() as usize]
    }

    fn fill(&mut self) {
        self.level += 1;
        let h = self.level;
        let mut out = Vec::new();
        let contains = |x: &Rational| self.lo.is_none_or(|l| l <= *x) && self.hi.is_none_or(|u| *x <= u);
        // denominator exactly h, |numerator| <= h
        if self.admits(h) {
            let first = self.lo.map_or(-h, |l| (l * Rational::int(h)).ceil().max(-h));
            let last = self.hi.map_or(h, |u| (u * Rational::int(h)).floor().min(h));
            for p in first..=last {
                if p.gcd(&h) == 1 {
                    out.push(Rational::new(p, h));
                }
            }
        }
        // |numerator| exactly h, denominator q < h
        for sign in [1, -1] {
            let (lo, hi) = if sign == 1 {
                (self.lo, self.hi)
            } else {
                (self.hi.map(|u| -u), self.lo.map(|l| -l))
            };
            // h/q lies in [lo, hi] and q in [1, h-1]
            if hi.is_some_and(|u| u <= Rational::ZERO) {
                continue;
            }
            let qmin = hi.map_or(1, |u| (Rational::int(h) / u).ceil().max(1));
            let qmax = match lo {
                Some(l) if l > Rational::ZERO => (Rational::int(h) / l).floor().min(h - 1),
                _ => h - 1,
            };
            for q in qmin..=qmax {
                if self.admits(q) && h.gcd(&q) == 1 {
                    let x = Rational::new(sign * h, q);
                    debug_assert!(contains(&x));
                    out.push(x);
                }
            }
        }
        out.retain(|x| self.order.contains(x));
        out.sort();
        self.buffer = out.into_iter();
    }
}

impl Iterator for CarrierIter<'_> {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        if self.empty {
            return None;
        }
        loop {
            if let Some(r) = self.buffer.next() {
                return Some(r);
            }
            self.fill();
        }
    }
}
