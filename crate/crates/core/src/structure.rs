//! The interface every countable colored order exposes to the checkers and
//! the back-and-forth engine.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// A color symbol. Ids are unique within a signature; the blank id marks
/// uncolored elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u64);

impl Color {
    pub const BLANK: Color = Color(u64::MAX);

    pub fn is_blank(self) -> bool {
        self == Color::BLANK
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_blank() {
            f.write_str("blank")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Label of a definable convex piece of a structure. Partners found by the
/// back-and-forth engine must lie in the region with the same label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Region(pub u64, pub u64);

/// A binary relation symbol `S_{i,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RelSym(pub usize, pub usize);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("malformed interval: lower bound {lower} is not below upper bound {upper}")]
    MalformedInterval { lower: String, upper: String },
    #[error("no complete witness solver: {0}")]
    Incomplete(String),
    #[error("witness search exhausted its bound: {0}")]
    Exhausted(String),
}

/// A request to find a witness strictly between two bounds.
#[derive(Debug, Clone)]
pub struct Query<'a, E> {
    pub lower: Option<&'a E>,
    pub upper: Option<&'a E>,
    pub color: Option<Color>,
    pub region: Option<Region>,
}

impl<'a, E> Query<'a, E> {
    pub fn between(lower: Option<&'a E>, upper: Option<&'a E>) -> Self {
        Query {
            lower,
            upper,
            color: None,
            region: None,
        }
    }

    pub fn color(mut self, c: Color) -> Self {
        self.color = Some(c);
        self
    }

    pub fn maybe_color(mut self, c: Option<Color>) -> Self {
        self.color = c;
        self
    }

    pub fn region(mut self, r: Option<Region>) -> Self {
        self.region = r;
        self
    }
}

/// Atomic diagram of a new element over an existing tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub color: Color,
    pub region: Option<Region>,
    /// `order[k]` compares the new element with `existing[k]`.
    pub order: Vec<Ordering>,
    /// `(sym, k, new_first)`: the atom `sym(new, existing[k])` when
    /// `new_first`, else `sym(existing[k], new)`, together with its truth value.
    pub relations: Vec<(RelSym, usize, bool, bool)>,
}

pub trait OrderedStructure {
    type Elem: Clone + Eq + Hash + Debug + Display;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;

    fn color(&self, a: &Self::Elem) -> Color;

    /// The canonical injective enumeration of the carrier.
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_>;

    /// A carrier element strictly between the bounds matching the color and
    /// region, or `None` when none exists. Must be complete.
    fn witness(&self, q: &Query<'_, Self::Elem>) -> Result<Option<Self::Elem>, WitnessError>;

    fn region(&self, _a: &Self::Elem) -> Option<Region> {
        None
    }

    /// Definable points (endpoints of definable convex pieces), increasing.
    fn landmarks(&self) -> Vec<Self::Elem> {
        Vec::new()
    }

    fn relation_symbols(&self) -> Vec<RelSym> {
        Vec::new()
    }

    fn related(&self, _sym: RelSym, _a: &Self::Elem, _b: &Self::Elem) -> bool {
        false
    }

    fn enumerate(&self, n: usize) -> Vec<Self::Elem> {
        self.elements().take(n).collect()
    }

    /// Finds an element realizing `pattern` over `existing`.
    ///
    /// The default narrows to the order interval and checks relation atoms
    /// afterwards; structures whose relations are not determined by order
    /// and color override it.
    fn find_partner(&self, existing: &[Self::Elem], pattern: &Pattern) -> Result<Option<Self::Elem>, WitnessError> {
        let (lower, upper) = match order_interval(self, existing, &pattern.order) {
            Some(b) => b,
            None => return Ok(None),
        };
        let q = Query::between(lower, upper).color(pattern.color).region(pattern.region);
        let Some(x) = self.witness(&q)? else {
            return Ok(None);
        };
        if pattern.relations.is_empty() || relations_hold(self, existing, pattern, &x) {
            Ok(Some(x))
        } else if self.relation_symbols().is_empty() {
            Ok(None)
        } else {
            Err(WitnessError::Incomplete(
                "relation atoms are not determined by the order interval".into(),
            ))
        }
    }
}

/// Lower and upper bound; `None` is unbounded.
pub type Bounds<'a, E> = (Option<&'a E>, Option<&'a E>);

/// The tightest bounds among `existing` implied by the order atoms, or
/// `None` if they are inconsistent.
pub fn order_interval<'a, S: OrderedStructure + ?Sized>(
    s: &S,
    existing: &'a [S::Elem],
    order: &[Ordering],
) -> Option<Bounds<'a, S::Elem>> {
    let mut lower: Option<&S::Elem> = None;
    let mut upper: Option<&S::Elem> = None;
    for (e, o) in existing.iter().zip(order) {
        match o {
            Ordering::Greater => {
                if lower.is_none_or(|l| s.compare(e, l) == Ordering::Greater) {
                    lower = Some(e);
                }
            }
            Ordering::Less => {
                if upper.is_none_or(|u| s.compare(e, u) == Ordering::Less) {
                    upper = Some(e);
                }
            }
            Ordering::Equal => return None,
        }
    }
    if let (Some(l), Some(u)) = (lower, upper) {
        if s.compare(l, u) != Ordering::Less {
            return None;
        }
    }
    Some((lower, upper))
}

pub fn relations_hold<S: OrderedStructure + ?Sized>(
    s: &S,
    existing: &[S::Elem],
    pattern: &Pattern,
    x: &S::Elem,
) -> bool {
    pattern.relations.iter().all(|&(sym, k, new_first, truth)| {
        let holds = if new_first {
            s.related(sym, x, &existing[k])
        } else {
            s.related(sym, &existing[k], x)
        };
        holds == truth
    })
}

/// Atomic diagram of `x` over `existing` in `s`.
pub fn pattern_of<S: OrderedStructure + ?Sized>(s: &S, existing: &[S::Elem], x: &S::Elem) -> Pattern {
    let syms = s.relation_symbols();
    let mut relations = Vec::new();
    for (k, e) in existing.iter().enumerate() {
        for &sym in &syms {
            relations.push((sym, k, true, s.related(sym, x, e)));
            relations.push((sym, k, false, s.related(sym, e, x)));
        }
    }
    Pattern {
        color: s.color(x),
        region: s.region(x),
        order: existing.iter().map(|e| s.compare(x, e)).collect(),
        relations,
    }
}

/// Hides region labels and landmarks, leaving only the atomic signature.
/// Used when the engine should run on order and colors alone.
pub struct Plain<'a, S>(pub &'a S);

impl<S: OrderedStructure> OrderedStructure for Plain<'_, S> {
    type Elem = S::Elem;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering {
        self.0.compare(a, b)
    }
    fn color(&self, a: &Self::Elem) -> Color {
        self.0.color(a)
    }
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        self.0.elements()
    }
    fn witness(&self, q: &Query<'_, Self::Elem>) -> Result<Option<Self::Elem>, WitnessError> {
        let q = Query {
            region: None,
            ..q.clone()
        };
        self.0.witness(&q)
    }
    fn relation_symbols(&self) -> Vec<RelSym> {
        self.0.relation_symbols()
    }
    fn related(&self, sym: RelSym, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.0.related(sym, a, b)
    }
}
