//! Monotone and shuffling relations between realized orders, coherent
//! families of them, and their limit structures.

mod limit;
mod verdict;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound;
use std::sync::Arc;

use crate::rational::Rational;
use crate::realize::RealizedOrder;
use crate::structure::{OrderedStructure, Query, WitnessError};

pub use limit::{cut_compare, cut_embed, limit_structure, Cut, LimitStructure};
pub use verdict::{Outcome, Verdict};

pub type Order = Arc<RealizedOrder>;

/// Elements scanned by the bounded search used for relations without a
/// fiber solver.
pub const DEFAULT_SEARCH_BOUND: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShuffleError {
    #[error("composition needs a shared middle order")]
    MiddleMismatch,
    #[error("{elem} is not in order {index}")]
    NotInCarrier { index: usize, elem: Rational },
    #[error("order index {0} out of range")]
    NoSuchOrder(usize),
    #[error("relation ({0}, {1}) is missing or has the wrong domains")]
    BadRelation(usize, usize),
    #[error("a cut compared with itself")]
    Reflexive,
    #[error("relation ({0}, {1}) has no decision procedure for membership")]
    Undecidable(usize, usize),
    #[error("family is not coherent: {0}")]
    Incoherent(String),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

type Predicate = Arc<dyn Fn(&Rational, &Rational) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum RelationKind {
    /// `a + shift < b`.
    Ambient {
        shift: Rational,
    },
    /// `a > b`.
    Reversed,
    Empty,
    /// An arbitrary predicate; fibers are searched, not solved.
    Custom(Predicate),
    /// `right ∘ left`, with the middle witness searched in `left.b`.
    Composed {
        left: Box<MonotoneRelation>,
        right: Box<MonotoneRelation>,
        search_bound: usize,
    },
}

impl fmt::Debug for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationKind::Ambient { shift } => write!(f, "Ambient({shift})"),
            RelationKind::Reversed => f.write_str("Reversed"),
            RelationKind::Empty => f.write_str("Empty"),
            RelationKind::Custom(_) => f.write_str("Custom"),
            RelationKind::Composed { left, right, .. } => {
                write!(f, "Composed({:?}, {:?})", left.kind, right.kind)
            }
        }
    }
}

/// A relation `S ⊆ A × B` between two realized orders.
#[derive(Debug, Clone)]
pub struct MonotoneRelation {
    pub a: Order,
    pub b: Order,
    pub kind: RelationKind,
}

/// An interval of the rational line with open, closed or missing ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound<Rational>,
    pub hi: Bound<Rational>,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: Bound::Unbounded,
        hi: Bound::Unbounded,
    };

    fn below(x: Rational) -> Self {
        Interval {
            lo: Bound::Unbounded,
            hi: Bound::Excluded(x),
        }
    }

    fn above(x: Rational) -> Self {
        Interval {
            lo: Bound::Excluded(x),
            hi: Bound::Unbounded,
        }
    }

    fn empty() -> Self {
        Interval {
            lo: Bound::Excluded(Rational::ZERO),
            hi: Bound::Excluded(Rational::ZERO),
        }
    }

    pub fn open(lo: Option<Rational>, hi: Option<Rational>) -> Self {
        Interval {
            lo: lo.map_or(Bound::Unbounded, Bound::Excluded),
            hi: hi.map_or(Bound::Unbounded, Bound::Excluded),
        }
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo, self.hi) {
            (Bound::Included(l), Bound::Included(h)) => l > h,
            (Bound::Included(l) | Bound::Excluded(l), Bound::Included(h) | Bound::Excluded(h)) => l >= h,
            _ => false,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match self.lo {
            Bound::Included(l) => l <= *x,
            Bound::Excluded(l) => l < *x,
            Bound::Unbounded => true,
        };
        let hi_ok = match self.hi {
            Bound::Included(h) => *x <= h,
            Bound::Excluded(h) => *x < h,
            Bound::Unbounded => true,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: tighter(self.lo, other.lo, Ordering::Greater),
            hi: tighter(self.hi, other.hi, Ordering::Less),
        }
    }

    /// Complement of an initial or final part of the line.
    fn complement(&self) -> Option<Interval> {
        if self.is_empty() {
            return Some(Interval::ALL);
        }
        let flip = |b: Bound<Rational>| match b {
            Bound::Included(x) => Bound::Excluded(x),
            Bound::Excluded(x) => Bound::Included(x),
            Bound::Unbounded => Bound::Unbounded,
        };
        match (self.lo, self.hi) {
            (Bound::Unbounded, Bound::Unbounded) => Some(Interval::empty()),
            (Bound::Unbounded, hi) => Some(Interval {
                lo: flip(hi),
                hi: Bound::Unbounded,
            }),
            (lo, Bound::Unbounded) => Some(Interval {
                lo: Bound::Unbounded,
                hi: flip(lo),
            }),
            _ => None,
        }
    }
}

/// The tighter of two bounds; `toward` is `Greater` for lower bounds.
fn tighter(a: Bound<Rational>, b: Bound<Rational>, toward: Ordering) -> Bound<Rational> {
    let value = |x: &Bound<Rational>| match x {
        Bound::Included(v) | Bound::Excluded(v) => Some(*v),
        Bound::Unbounded => None,
    };
    match (value(&a), value(&b)) {
        (None, _) => b,
        (_, None) => a,
        (Some(x), Some(y)) => match x.cmp(&y) {
            Ordering::Equal => {
                if matches!(a, Bound::Excluded(_)) {
                    a
                } else {
                    b
                }
            }
            o if o == toward => a,
            _ => b,
        },
    }
}

/// An element of `order` inside the interval, or `None` if there is none.
pub fn find_in(order: &RealizedOrder, i: &Interval) -> Result<Option<Rational>, WitnessError> {
    if i.is_empty() {
        return Ok(None);
    }
    for end in [i.lo, i.hi] {
        if let Bound::Included(x) = end {
            if order.contains(&x) {
                return Ok(Some(x));
            }
        }
    }
    let value = |b: Bound<Rational>| match b {
        Bound::Included(v) | Bound::Excluded(v) => Some(v),
        Bound::Unbounded => None,
    };
    let (lo, hi) = (value(i.lo), value(i.hi));
    if lo.is_some() && lo == hi {
        return Ok(None);
    }
    order.witness(&Query::between(lo.as_ref(), hi.as_ref()))
}

/// Which side of the relation a fiber lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `S(A, b)`.
    A,
    /// `S(a, B)`.
    B,
}

impl MonotoneRelation {
    pub fn new(a: Order, b: Order, kind: RelationKind) -> Self {
        MonotoneRelation { a, b, kind }
    }

    /// The ambient order `<` restricted to `A × B`.
    pub fn restrict_ambient(a: Order, b: Order) -> Self {
        Self::shifted(a, b, Rational::ZERO)
    }

    /// `{(a, b) | a + shift < b}`.
    pub fn shifted(a: Order, b: Order, shift: Rational) -> Self {
        Self::new(a, b, RelationKind::Ambient { shift })
    }

    pub fn custom(a: Order, b: Order, f: impl Fn(&Rational, &Rational) -> bool + Send + Sync + 'static) -> Self {
        Self::new(a, b, RelationKind::Custom(Arc::new(f)))
    }

    /// Membership of `(a, b)`. Fails only when a composition's middle
    /// witness cannot be decided.
    pub fn member(&self, a: &Rational, b: &Rational) -> Result<bool, WitnessError> {
        match &self.kind {
            RelationKind::Ambient { shift } => Ok(*a + *shift < *b),
            RelationKind::Reversed => Ok(a > b),
            RelationKind::Empty => Ok(false),
            RelationKind::Custom(f) => Ok(f(a, b)),
            RelationKind::Composed {
                left,
                right,
                search_bound,
            } => {
                if matches!(left.kind, RelationKind::Empty) || matches!(right.kind, RelationKind::Empty) {
                    return Ok(false);
                }
                if let (Some(l), Some(r)) = (left.fiber(Side::B, a), right.fiber(Side::A, b)) {
                    return Ok(find_in(&left.b, &l.intersect(&r))?.is_some());
                }
                for m in left.b.iter().take(*search_bound) {
                    if left.member(a, &m)? && right.member(&m, b)? {
                        return Ok(true);
                    }
                }
                Err(WitnessError::Exhausted(format!(
                    "no middle witness for ({a}, {b}) among {search_bound} elements and no solver for {:?}",
                    self.kind
                )))
            }
        }
    }

    /// Whether membership is decided without search.
    pub fn is_direct(&self) -> bool {
        !matches!(self.kind, RelationKind::Composed { .. })
    }

    /// The fiber `S(A, x)` (side A) or `S(x, B)` (side B) as an interval,
    /// when the relation has a solver.
    fn fiber(&self, side: Side, x: &Rational) -> Option<Interval> {
        match (&self.kind, side) {
            (RelationKind::Ambient { shift }, Side::A) => Some(Interval::below(*x - *shift)),
            (RelationKind::Ambient { shift }, Side::B) => Some(Interval::above(*x + *shift)),
            (RelationKind::Reversed, Side::A) => Some(Interval::above(*x)),
            (RelationKind::Reversed, Side::B) => Some(Interval::below(*x)),
            (RelationKind::Empty, _) => Some(Interval::empty()),
            _ => None,
        }
    }

    fn domain(&self, side: Side) -> &RealizedOrder {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    fn holds(&self, side: Side, fixed: &Rational, y: &Rational) -> Result<bool, WitnessError> {
        match side {
            Side::A => self.member(y, fixed),
            Side::B => self.member(fixed, y),
        }
    }

    /// An element `y` of the `side` domain inside `within` such that the
    /// membership of `y` in each listed fiber matches its flag. Witnesses
    /// are re-checked by membership.
    fn fiber_witness(
        &self,
        side: Side,
        within: &Interval,
        fibers: &[(&Rational, bool)],
    ) -> Result<Option<Rational>, WitnessError> {
        let dom = self.domain(side);
        let mut solved = Some(*within);
        for &(x, inside) in fibers {
            let part = self
                .fiber(side, x)
                .and_then(|f| if inside { Some(f) } else { f.complement() });
            solved = match (solved, part) {
                (Some(s), Some(p)) => Some(s.intersect(&p)),
                _ => None,
            };
        }
        let check = |y: &Rational| -> Result<bool, WitnessError> {
            for &(x, inside) in fibers {
                if self.holds(side, x, y)? != inside {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        if let Some(i) = solved {
            return match find_in(dom, &i)? {
                Some(y) if !check(&y)? => Err(WitnessError::Incomplete(format!(
                    "fiber solver produced {y}, which fails membership"
                ))),
                found => Ok(found),
            };
        }
        for y in dom.iter().take(DEFAULT_SEARCH_BOUND) {
            if within.contains(&y) && check(&y)? {
                return Ok(Some(y));
            }
        }
        Err(WitnessError::Exhausted(format!(
            "no fiber witness among the first {DEFAULT_SEARCH_BOUND} elements"
        )))
    }
}

/// `T ∘ S`: pairs `(a, c)` with some middle `b`, `(a, b) ∈ S`, `(b, c) ∈ T`.
pub fn compose(
    s: &MonotoneRelation,
    t: &MonotoneRelation,
    witness_depth: usize,
) -> Result<MonotoneRelation, ShuffleError> {
    if !Arc::ptr_eq(&s.b, &t.a) && *s.b != *t.a {
        return Err(ShuffleError::MiddleMismatch);
    }
    Ok(MonotoneRelation::new(
        s.a.clone(),
        t.b.clone(),
        RelationKind::Composed {
            left: Box::new(s.clone()),
            right: Box::new(t.clone()),
            search_bound: witness_depth,
        },
    ))
}

fn show(xs: &[&Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Checks on the first `depth` elements of each side that fibers are
/// initial parts of `A` and final parts of `B`.
pub fn check_monotone(s: &MonotoneRelation, depth: usize) -> Verdict {
    let name = "monotone";
    let mut xs = s.a.enumerate(depth);
    let mut ys = s.b.enumerate(depth);
    xs.sort();
    ys.sort();
    let run = || -> Result<Option<Vec<String>>, WitnessError> {
        let mut inside = vec![vec![false; ys.len()]; xs.len()];
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                inside[i][j] = s.member(x, y)?;
            }
        }
        // each column is an initial segment of xs, each row a final segment of ys
        for (j, y) in ys.iter().enumerate() {
            if let Some(i2) = (0..xs.len()).find(|&i| !inside[i][j]) {
                if let Some(i) = (i2 + 1..xs.len()).find(|&i| inside[i][j]) {
                    return Ok(Some(show(&[&xs[i2], &xs[i], y, y])));
                }
            }
        }
        for (i, x) in xs.iter().enumerate() {
            if let Some(j2) = (0..ys.len()).rev().find(|&j| !inside[i][j]) {
                if let Some(j) = (0..j2).find(|&j| inside[i][j]) {
                    return Ok(Some(show(&[x, x, &ys[j], &ys[j2]])));
                }
            }
        }
        Ok(None)
    };
    Verdict::from_run(name, depth, run())
}

/// Checks the shuffling axioms on samples of size `depth`: monotonicity,
/// non-emptiness, strictly increasing fibers `S(A, b)` with a separating
/// witness, strictly decreasing fibers `S(a, B)`, and a larger element of
/// `S(A, b)` above each sampled member.
pub fn check_shuffling(s: &MonotoneRelation, depth: usize) -> Verdict {
    let name = "shuffling";
    let mono = check_monotone(s, depth);
    if mono.outcome == Outcome::Fail {
        return Verdict {
            check: name.into(),
            ..mono
        };
    }
    let mut xs = s.a.enumerate(depth);
    let mut ys = s.b.enumerate(depth);
    xs.sort();
    ys.sort();
    let run = || -> Result<Option<(Vec<String>, String)>, WitnessError> {
        let mut nonempty = false;
        'search: for b in &ys {
            for a in &xs {
                if s.member(a, b)? {
                    nonempty = true;
                    break 'search;
                }
            }
        }
        if !nonempty {
            let any = ys
                .iter()
                .find_map(|b| s.fiber_witness(Side::A, &Interval::ALL, &[(b, true)]).transpose());
            if any.transpose()?.is_none() {
                return Ok(Some((Vec::new(), "relation is empty".into())));
            }
        }
        // fibers are monotone, so strict steps between neighbours suffice
        for w in ys.windows(2) {
            let (b, b2) = (&w[0], &w[1]);
            if s.fiber_witness(Side::A, &Interval::ALL, &[(b2, true), (b, false)])?
                .is_none()
            {
                return Ok(Some((show(&[b, b2]), "fibers S(A, b) do not strictly increase".into())));
            }
        }
        for w in xs.windows(2) {
            let (a, a2) = (&w[0], &w[1]);
            if s.fiber_witness(Side::B, &Interval::ALL, &[(a, true), (a2, false)])?
                .is_none()
            {
                return Ok(Some((show(&[a, a2]), "fibers S(a, B) do not strictly decrease".into())));
            }
        }
        // the largest sampled member of a fiber is the one to exceed
        for b in &ys {
            let mut top = None;
            for a in &xs {
                if s.member(a, b)? {
                    top = Some(a);
                }
            }
            let Some(a) = top else { continue };
            let above = Interval::open(Some(*a), None);
            if s.fiber_witness(Side::A, &above, &[(b, true)])?.is_none() {
                return Ok(Some((show(&[a, b]), "fiber S(A, b) has a greatest element".into())));
            }
        }
        Ok(None)
    };
    Verdict::from_run_with_reason(name, depth, run())
}

/// A family `(S_{i,j} | i < j)` of relations between indexed orders.
#[derive(Debug, Clone)]
pub struct ShuffleFamily {
    orders: Vec<Order>,
    relations: BTreeMap<(usize, usize), MonotoneRelation>,
}

impl ShuffleFamily {
    /// Every pair `i < j` needs a relation on `orders[i] × orders[j]`.
    pub fn new(
        orders: Vec<Order>,
        relations: BTreeMap<(usize, usize), MonotoneRelation>,
    ) -> Result<Self, ShuffleError> {
        for i in 0..orders.len() {
            for j in i + 1..orders.len() {
                let ok = relations
                    .get(&(i, j))
                    .is_some_and(|r| *r.a == *orders[i] && *r.b == *orders[j]);
                if !ok {
                    return Err(ShuffleError::BadRelation(i, j));
                }
            }
        }
        if let Some(&(i, j)) = relations.keys().find(|(i, j)| i >= j || *j >= orders.len()) {
            return Err(ShuffleError::BadRelation(i, j));
        }
        Ok(ShuffleFamily { orders, relations })
    }

    /// `S_{i,j}(a, b) ⇔ a + (shifts[j] - shifts[i]) < b`.
    pub fn shifted(orders: Vec<Order>, shifts: &[Rational]) -> Self {
        let mut relations = BTreeMap::new();
        for i in 0..orders.len() {
            for j in i + 1..orders.len() {
                let r = MonotoneRelation::shifted(orders[i].clone(), orders[j].clone(), shifts[j] - shifts[i]);
                relations.insert((i, j), r);
            }
        }
        ShuffleFamily { orders, relations }
    }

    /// The ambient order restricted to every pair.
    pub fn ambient(orders: Vec<Order>) -> Self {
        let zeros = vec![Rational::ZERO; orders.len()];
        Self::shifted(orders, &zeros)
    }

    /// The color classes of `dense_partition(k)` with the ambient order.
    pub fn dense_partition(k: u32) -> Result<Self, crate::realize::RealizeError> {
        let m = RealizedOrder::dense_partition(k)?;
        let orders = (0..k)
            .map(|c| Arc::new(m.restrict_colors(&[crate::structure::Color(c as u64)])))
            .collect();
        Ok(Self::ambient(orders))
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn order(&self, i: usize) -> Result<&Order, ShuffleError> {
        self.orders.get(i).ok_or(ShuffleError::NoSuchOrder(i))
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn relation(&self, i: usize, j: usize) -> Result<&MonotoneRelation, ShuffleError> {
        self.relations.get(&(i, j)).ok_or(ShuffleError::BadRelation(i, j))
    }

    /// Replaces `S_{i,j}`; the domains must match.
    pub fn with_relation(mut self, i: usize, j: usize, r: MonotoneRelation) -> Result<Self, ShuffleError> {
        let fits = i < j && j < self.orders.len() && *r.a == *self.orders[i] && *r.b == *self.orders[j];
        if !fits {
            return Err(ShuffleError::BadRelation(i, j));
        }
        self.relations.insert((i, j), r);
        Ok(self)
    }

    /// Numbers of member orders with a minimum and with a maximum.
    pub fn endpoint_census(&self) -> (usize, usize) {
        let mins = self.orders.iter().filter(|o| o.minimum().is_some()).count();
        let maxs = self.orders.iter().filter(|o| o.maximum().is_some()).count();
        (mins, maxs)
    }
}

/// Runs [`check_shuffling`] on every relation of the family.
pub fn check_family_shuffling(f: &ShuffleFamily, depth: usize) -> Verdict {
    for (&(i, j), r) in &f.relations {
        let v = check_shuffling(r, depth);
        if v.outcome == Outcome::Fail {
            let mut v = v;
            v.reason = Some(format!("S_{{{i},{j}}}: {}", v.reason.unwrap_or_default()));
            return v;
        }
    }
    Verdict::pass("shuffling", depth)
}

/// Checks `S_{j,k} ∘ S_{i,j} = S_{i,k}` on the first `depth` elements of
/// `A_i` and `A_k`, for all `i < j < k`.
pub fn check_coherence(f: &ShuffleFamily, depth: usize) -> Verdict {
    let name = "coherence";
    let run = || -> Result<Option<(Vec<String>, String)>, ShuffleError> {
        let n = f.len();
        for i in 0..n {
            let xs = f.orders[i].enumerate(depth);
            for k in i + 2..n {
                let zs = f.orders[k].enumerate(depth);
                let direct = f.relation(i, k)?;
                for j in i + 1..k {
                    let via = compose(f.relation(i, j)?, f.relation(j, k)?, DEFAULT_SEARCH_BOUND)?;
                    for a in &xs {
                        for c in &zs {
                            let d = direct.member(a, c)?;
                            if d != via.member(a, c)? {
                                let why =
                                    format!("S_{{{i},{k}}}({a}, {c}) is {d} but the composite through {j} is {}", !d);
                                return Ok(Some((show(&[a, c]), why)));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    };
    Verdict::from_run_with_reason(name, depth, run())
}
