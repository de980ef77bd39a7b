use std::cmp::Ordering;
use std::sync::Arc;

use super::{InvariantTuple, TheoryTag};
use crate::ordertype::CanonicalOrderType;
use crate::rational::Rational;
use crate::realize::{ColoredOrderSpec, Palette, Piece, RealizedOrder, RungLayout, Span};
use crate::shuffle::{check_coherence, check_family_shuffling, ShuffleFamily, Verdict};
use crate::structure::{
    order_interval, relations_hold, Color, OrderedStructure, Pattern, Query, Region, RelSym, WitnessError,
};

/// Colors of `p`-parts start here; `C_n` and `D_i` colors stay below.
pub(super) const P_BASE: u64 = 1 << 32;
/// Color of the `q`-part.
pub(super) const Q_COLOR: u64 = 1 << 33;

/// A designated part of a model, named by its type index.
#[derive(Debug, Clone)]
pub struct Part {
    pub name: String,
    pub order: RealizedOrder,
}

/// Geometry of the shuffled blocks: block `i` is `(i, i+1)`, its elements
/// have local coordinate `x - i` of 2-adic class `i`, and `S_{i,j}` holds
/// iff the local coordinates increase.
#[derive(Debug, Clone, Copy)]
pub(super) struct Blocks {
    pub count: u32,
    /// Width of the inner ladder of convex colors, if any.
    pub ladder: Option<Rational>,
}

impl Blocks {
    pub fn palette(&self) -> Palette {
        Palette::Capped(self.count - 1)
    }

    pub fn of_color(&self, c: Color) -> Option<u32> {
        match c.0 {
            c if c < P_BASE => Some((c % self.count as u64) as u32),
            c if c < Q_COLOR => Some((c - P_BASE) as u32),
            _ => None,
        }
    }

    pub fn of_elem(&self, x: &Rational) -> Option<u32> {
        let i = x.floor();
        (0 <= i && i < self.count as i128 && !x.is_integer()).then_some(i as u32)
    }

    pub fn layout(&self, i: u32) -> Option<RungLayout> {
        self.ladder.map(|width| RungLayout::Geometric {
            origin: Rational::int(i as i128),
            width,
        })
    }
}

/// A model of one of the example theories over the rationals.
#[derive(Debug, Clone)]
pub struct Model {
    pub(super) theory: TheoryTag,
    pub(super) requested: InvariantTuple,
    pub(super) carrier: RealizedOrder,
    pub(super) parts: Vec<Part>,
    pub(super) blocks: Option<Blocks>,
}

impl Model {
    pub fn theory(&self) -> TheoryTag {
        self.theory
    }

    pub fn truncation(&self) -> u32 {
        self.requested.truncation
    }

    /// The tuple the model was built from.
    pub fn requested(&self) -> &InvariantTuple {
        &self.requested
    }

    pub fn carrier(&self) -> &RealizedOrder {
        &self.carrier
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn part(&self, name: &str) -> Option<&RealizedOrder> {
        self.parts.iter().find(|p| p.name == name).map(|p| &p.order)
    }

    pub fn spec(&self) -> Option<&ColoredOrderSpec> {
        self.carrier.spec()
    }

    /// Number of shuffled blocks `O_i`; zero when the theory has none.
    pub fn block_count(&self) -> u32 {
        self.blocks.map_or(0, |b| b.count)
    }

    /// Index `i` of the dense color `D_i` of a `p`-element.
    pub(super) fn min_color_index(&self, x: &Rational) -> u32 {
        let c = self.carrier.color_of(x).expect("minimum is in the carrier");
        (c.0 - P_BASE) as u32
    }

    /// The block `O_i`.
    pub fn block(&self, i: u32) -> Option<RealizedOrder> {
        let b = self.blocks.filter(|b| i < b.count)?;
        let lo = Rational::int(i as i128);
        let _ = b;
        Some(self.carrier.restrict_span(Span::open(lo, lo + Rational::ONE)))
    }

    /// The convex color `C_{i,n}` as an order of its own.
    pub fn rung(&self, i: u32, n: u32) -> Option<RealizedOrder> {
        let b = self.blocks.filter(|b| i < b.count)?;
        let layout = b.layout(i)?;
        let mut colors = vec![None; b.count as usize];
        colors[i as usize] = Some(Color(i as u64 + n as u64 * b.count as u64));
        Some(RealizedOrder::from_pieces(vec![Piece::dense(
            layout.rung(n),
            b.palette(),
            colors,
            Region(i as u64, n as u64),
        )]))
    }

    /// The blocks `O_i` with `S_{i,j}`.
    pub fn family(&self) -> Option<ShuffleFamily> {
        let b = self.blocks?;
        let orders = (0..b.count)
            .map(|i| Arc::new(self.block(i).expect("index in range")))
            .collect();
        Some(ShuffleFamily::shifted(orders, &shifts(b.count)))
    }

    /// The colors `C_{i,n}` for fixed `n`, with `S_{i,j}` restricted.
    pub fn rung_family(&self, n: u32) -> Option<ShuffleFamily> {
        let b = self.blocks.filter(|b| b.ladder.is_some())?;
        let orders = (0..b.count)
            .map(|i| Arc::new(self.rung(i, n).expect("ladder present")))
            .collect();
        Some(ShuffleFamily::shifted(orders, &shifts(b.count)))
    }

    /// Bounded checks of the axioms of a shuffled model: a dense order
    /// without endpoints, convex blocks and convex colors inside them,
    /// shuffling and coherence of the blocks and of the colors of each
    /// rung. Theories without blocks only get the order checks.
    pub fn check_axioms(&self, depth: usize) -> Vec<Verdict> {
        let mut out = vec![self.check_dense(depth)];
        let Some(b) = self.blocks else {
            return out;
        };
        let sample = self.carrier.enumerate(depth);
        out.push(check_convex("convex-blocks", depth, &sample, |x| {
            b.of_elem(x).filter(|_| self.color(x).0 < Q_COLOR).map(|i| i as u64)
        }));
        if b.ladder.is_some() {
            out.push(check_convex("convex-colors", depth, &sample, |x| {
                let c = self.color(x).0;
                (c < P_BASE).then_some(c)
            }));
        }
        let f = self.family().expect("blocks present");
        out.push(renamed(check_family_shuffling(&f, depth), "block-shuffling"));
        out.push(renamed(check_coherence(&f, depth), "block-coherence"));
        if b.ladder.is_some() {
            for n in 0..RUNGS_CHECKED {
                let f = self.rung_family(n).expect("ladder present");
                let v = check_family_shuffling(&f, depth);
                if !v.passed() {
                    out.push(renamed(v, "color-shuffling"));
                    return out;
                }
            }
            out.push(Verdict::pass("color-shuffling", depth));
        }
        out
    }

    fn check_dense(&self, depth: usize) -> Verdict {
        let name = "dense-order";
        let mut xs = self.carrier.enumerate(depth);
        xs.sort();
        let run = || -> Result<Option<(Vec<String>, String)>, WitnessError> {
            for w in xs.windows(2) {
                if self.witness(&Query::between(Some(&w[0]), Some(&w[1])))?.is_none() {
                    return Ok(Some((show(w), "no element between consecutive samples".into())));
                }
            }
            if let Some(lo) = xs.first() {
                if self.witness(&Query::between(None, Some(lo)))?.is_none() {
                    return Ok(Some((show(&xs[..1]), "least sample is a minimum".into())));
                }
            }
            if let Some(hi) = xs.last() {
                if self.witness(&Query::between(Some(hi), None))?.is_none() {
                    return Ok(Some((show(&xs[xs.len() - 1..]), "greatest sample is a maximum".into())));
                }
            }
            Ok(None)
        };
        Verdict::from_run_with_reason(name, depth, run())
    }
}

/// Rungs per block whose colors are checked for shuffling.
const RUNGS_CHECKED: u32 = 3;

fn shifts(count: u32) -> Vec<Rational> {
    (0..count).map(|i| Rational::int(i as i128)).collect()
}

fn show(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn renamed(v: Verdict, name: &str) -> Verdict {
    Verdict {
        check: name.into(),
        ..v
    }
}

/// Every label class is convex among the sorted sample: once left, a label
/// does not come back.
fn check_convex(name: &str, depth: usize, sample: &[Rational], label: impl Fn(&Rational) -> Option<u64>) -> Verdict {
    let mut xs = sample.to_vec();
    xs.sort();
    let mut seen = std::collections::HashMap::new();
    let mut last: Option<(u64, Rational)> = None;
    for x in &xs {
        match label(x) {
            Some(l) => {
                if last.is_some_and(|(m, _)| m != l) {
                    if let Some(first) = seen.get(&l) {
                        return Verdict::fail(
                            name,
                            depth,
                            vec![format!("{first}"), format!("{x}")],
                            format!("class {l} is not convex"),
                        );
                    }
                }
                seen.entry(l).or_insert(*x);
                last = Some((l, *x));
            }
            None => last = None,
        }
    }
    Verdict::pass(name, depth)
}

impl OrderedStructure for Model {
    type Elem = Rational;

    fn compare(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }

    fn color(&self, a: &Rational) -> Color {
        self.carrier.color(a)
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Rational> + '_> {
        self.carrier.elements()
    }

    fn witness(&self, q: &Query<'_, Rational>) -> Result<Option<Rational>, WitnessError> {
        self.carrier.witness(q)
    }

    fn region(&self, a: &Rational) -> Option<Region> {
        self.carrier.region(a)
    }

    fn landmarks(&self) -> Vec<Rational> {
        self.carrier.landmarks()
    }

    fn relation_symbols(&self) -> Vec<RelSym> {
        let n = self.block_count() as usize;
        (0..n).flat_map(|i| (i + 1..n).map(move |j| RelSym(i, j))).collect()
    }

    fn related(&self, sym: RelSym, a: &Rational, b: &Rational) -> bool {
        let Some(blocks) = self.blocks else {
            return false;
        };
        let RelSym(i, j) = sym;
        blocks.of_elem(a) == Some(i as u32)
            && blocks.of_elem(b) == Some(j as u32)
            && *a - Rational::int(i as i128) < *b - Rational::int(j as i128)
    }

    /// Relation atoms with an element of another block are bounds on the
    /// local coordinate, so they narrow the search interval exactly.
    fn find_partner(&self, existing: &[Rational], pattern: &Pattern) -> Result<Option<Rational>, WitnessError> {
        let Some((lower, upper)) = order_interval(self, existing, &pattern.order) else {
            return Ok(None);
        };
        let (mut lo, mut hi) = (lower.copied(), upper.copied());
        if let Some(blocks) = self.blocks {
            let home = blocks.of_color(pattern.color);
            for &(RelSym(a, b), k, new_first, truth) in &pattern.relations {
                let (mine, other) = if new_first { (a, b) } else { (b, a) };
                let e = existing[k];
                let applies = home == Some(mine as u32) && blocks.of_elem(&e) == Some(other as u32);
                if !applies {
                    if truth {
                        return Ok(None);
                    }
                    continue;
                }
                let bound = e - Rational::int(other as i128) + Rational::int(mine as i128);
                // local coordinates of distinct blocks never coincide
                if new_first == truth {
                    hi = Some(hi.map_or(bound, |h| h.min(bound)));
                } else {
                    lo = Some(lo.map_or(bound, |l| l.max(bound)));
                }
            }
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if l >= h {
                return Ok(None);
            }
        }
        let q = Query::between(lo.as_ref(), hi.as_ref())
            .color(pattern.color)
            .region(pattern.region);
        let Some(x) = self.witness(&q)? else {
            return Ok(None);
        };
        if relations_hold(self, existing, pattern, &x) {
            Ok(Some(x))
        } else {
            Err(WitnessError::Incomplete(format!("partner {x} fails a relation atom")))
        }
    }
}

/// Classification from the pieces of a part: finite size, or a dense part
/// whose endpoints are its isolated points.
pub(super) fn classify_exact(o: &RealizedOrder) -> CanonicalOrderType {
    if let Some(n) = o.finite_size() {
        return if n == 0 {
            CanonicalOrderType::Empty
        } else {
            CanonicalOrderType::Finite(n as u64)
        };
    }
    if matches!(o.witness(&Query::between(None, None)), Ok(None)) {
        return CanonicalOrderType::Empty;
    }
    CanonicalOrderType::Dense {
        has_min: o.minimum().is_some(),
        has_max: o.maximum().is_some(),
    }
}

/// Classification from the first `n` enumerated elements and the definable
/// points: gaps between consecutive samples, and elements beyond the
/// extreme samples.
pub(super) fn classify_probe(o: &RealizedOrder, n: usize) -> Result<CanonicalOrderType, String> {
    let sample = o.enumerate(n);
    let enumerated = sample.len();
    let mut xs: Vec<Rational> = sample.into_iter().chain(o.landmarks()).collect();
    xs.sort();
    xs.dedup();
    let Some((&first, &last)) = xs.first().zip(xs.last()) else {
        return Ok(CanonicalOrderType::Empty);
    };
    let between = |l: Option<&Rational>, u: Option<&Rational>| {
        o.witness(&Query::between(l, u))
            .map_err(|e| e.to_string())
            .map(|w| w.is_some())
    };
    let has_min = !between(None, Some(&first))?;
    let has_max = !between(Some(&last), None)?;
    let mut gaps = 0;
    for w in xs.windows(2) {
        if !between(Some(&w[0]), Some(&w[1]))? {
            gaps += 1;
        }
    }
    if enumerated < n {
        if gaps == xs.len() - 1 && has_min && has_max {
            return Ok(CanonicalOrderType::Finite(xs.len() as u64));
        }
        return Err(format!("{} elements enumerated but the part is not discrete", xs.len()));
    }
    if gaps > 0 {
        return Err(format!("{gaps} gaps among {n} samples of an infinite part"));
    }
    Ok(CanonicalOrderType::Dense { has_min, has_max })
}
